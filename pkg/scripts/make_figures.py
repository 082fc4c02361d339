"""Render the reference figures as SVG through the CLI.

Usage: python3 scripts/make_figures.py [--out figures]
"""
import argparse
from pathlib import Path

from circumfeas.cli import main as cli

FIGURES = [
    # (name, scenario, method, start, style)
    ("planar_cones", "r2_cones", "crm", 0, "plane"),
    ("planar_rays", "r2_rays", "crm", 0, "plane"),
    ("planar_polyhedra", "r2_polyhedra", "crm", 0, "plane"),
    ("planar_polyhedra_map", "r2_polyhedra", "map", 0, "plane"),
    ("sphere_srm", "r3_cones", "srm", 0, "sphere_orthographic"),
    ("counterexample", "counterexample", "crm", 0, "sphere_orthographic"),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="figures")
    args = p.parse_args(argv)
    root = Path(args.out)
    for name, scenario, method, start, style in FIGURES:
        run_dir = root / name
        code = cli(["run", "--scenario", scenario, "--method", method, "--start", str(start),
                    "--out", str(run_dir)])
        if code == 2:
            raise SystemExit(f"{name}: run failed")
        if cli(["plot", "--trace", str(run_dir), "--style", style, "--out", str(root / f"{name}.svg")]):
            raise SystemExit(f"{name}: plot failed")
        print(f"wrote {root / f'{name}.svg'}")


if __name__ == "__main__":
    main()
