"""Bounds on the minimum energy for controlling linear network dynamics.

Builds symmetric weighted networks, computes finite-horizon
controllability Gramians through the spectral factorization G = P M P^T,
evaluates exact and trace-moment-estimated energy bounds for unit
targets, and verifies the predicted scaling of those bounds with the
control horizon across adjacency definiteness classes and driver-node
counts.
"""

from ._kernels import BACKEND
from .bounds import (
    EnergyBounds,
    TracePair,
    energy_bounds_estimated,
    energy_bounds_exact,
    estimate_lambda_max,
    estimate_lambda_min,
    f_lam,
    lower_bound_trace_prior,
    traces_one_driver_closed_form,
)
from .errors import (
    ConditioningError,
    ConfigError,
    ContractError,
    NetctrlError,
    NumericalError,
    OverflowCapError,
    ParameterError,
    UncontrollableError,
)
from .gramian import (
    DriverSet,
    GramianResult,
    build_m,
    build_network_gramian,
    f_entry,
    gramian_quadrature,
    min_energy,
    optimal_input,
    simulate_trajectory,
)
from .netgen import (
    Definiteness,
    UndirectedGraph,
    WeightedNetwork,
    classify,
    generate_ba,
    load_network,
    save_network,
    weight_and_shift,
)
from .scaling import (
    FitResult,
    ScalingLaw,
    SweepRecord,
    fit,
    n_driver_analytic_eigs,
    predict,
    sweep,
)
from .spectral import SpectralDecomposition, eig_sym

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConditioningError",
    "ConfigError",
    "ContractError",
    "Definiteness",
    "DriverSet",
    "EnergyBounds",
    "FitResult",
    "GramianResult",
    "NetctrlError",
    "NumericalError",
    "OverflowCapError",
    "ParameterError",
    "ScalingLaw",
    "SpectralDecomposition",
    "SweepRecord",
    "TracePair",
    "UncontrollableError",
    "UndirectedGraph",
    "WeightedNetwork",
    "build_m",
    "build_network_gramian",
    "classify",
    "eig_sym",
    "energy_bounds_estimated",
    "energy_bounds_exact",
    "estimate_lambda_max",
    "estimate_lambda_min",
    "f_entry",
    "f_lam",
    "fit",
    "generate_ba",
    "gramian_quadrature",
    "load_network",
    "lower_bound_trace_prior",
    "min_energy",
    "n_driver_analytic_eigs",
    "optimal_input",
    "predict",
    "save_network",
    "simulate_trajectory",
    "sweep",
    "traces_one_driver_closed_form",
    "weight_and_shift",
]
