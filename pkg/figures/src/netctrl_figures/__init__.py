"""Panels from netctrl experiment artifacts (sweep CSVs + summary JSON)."""

from .panels import PanelSpec, SchemaError, build_panels, parse_estimator_csv, parse_sweep_csv
from .render import RenderReport, render

__version__ = "0.1.0"

__all__ = [
    "PanelSpec",
    "RenderReport",
    "SchemaError",
    "build_panels",
    "parse_estimator_csv",
    "parse_sweep_csv",
    "render",
]
