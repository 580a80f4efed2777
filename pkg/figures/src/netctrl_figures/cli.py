"""Batch renderer: netctrl run directory in, image directory out."""

import argparse
import sys
from pathlib import Path

from .panels import SchemaError, build_panels
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="netctrl-figures",
        description="Render netctrl sweep CSVs and summaries into panels.",
    )
    parser.add_argument("run_dir", type=Path, help="directory of experiment outputs")
    parser.add_argument("out_dir", type=Path, help="directory for the images")
    args = parser.parse_args(argv)

    if not args.run_dir.is_dir():
        print(f"error: {args.run_dir} is not a directory", file=sys.stderr)
        return 2
    try:
        panels = build_panels(args.run_dir, args.out_dir)
        if not panels:
            print(f"error: no experiment summaries under {args.run_dir}", file=sys.stderr)
            return 1
        reports = render(panels)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    for rep in reports:
        print(f"{rep.out_path} ({rep.n_points} points, {len(rep.overlay_windows)} overlays)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
