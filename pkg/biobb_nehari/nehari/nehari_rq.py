#!/usr/bin/env python3

"""Umbrella command line dispatching the nehari building blocks as subcommands."""

import argparse
import os
from typing import List, Optional

from biobb_common.configuration import settings

from biobb_nehari.nehari.branch import branch
from biobb_nehari.nehari.extremal import extremal
from biobb_nehari.nehari.fiber import fiber
from biobb_nehari.nehari.ground_state import ground_state
from biobb_nehari.nehari.nehari_check import nehari_check
from biobb_nehari.nehari.quotient import quotient
from biobb_nehari.nehari.zero_mass import zero_mass

# subcommand: (wrapper, output argument -> file name)
TASKS = {
    "fiber": (fiber, {"output_fiber_path": "fiber.json", "output_profile_path": "fiber_profile.csv"}),
    "quotient": (quotient, {"output_quotient_path": "quotient.json", "output_profile_path": "quotient_profile.csv"}),
    "extremal": (extremal, {"output_extremal_path": "extremal.json", "output_minimizer_path": "minimizer.csv"}),
    "ground-state": (ground_state, {"output_solution_path": "ground_state.json", "output_function_path": "ground_state.csv"}),
    "branch": (branch, {"output_branch_path": "branch.csv", "output_summary_path": "branch.json"}),
    "zero-mass": (zero_mass, {"output_zero_mass_path": "zero_mass.json", "output_profile_path": "zero_mass_profile.csv"}),
    "check": (nehari_check, {"output_check_path": "check.json"}),
}
GRID_TASKS = ("fiber", "quotient", "extremal", "ground-state", "branch", "zero-mass")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nehari_rq",
        description="Nonlinear generalized Rayleigh quotient experiments.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    subparsers = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        sub = subparsers.add_parser(task, formatter_class=parser.formatter_class)
        sub.add_argument(
            "-c",
            "--config",
            required=False,
            help="This file can be a YAML file, JSON file or JSON string",
        )
        sub.add_argument("--seed", type=int, required=False, help="Seed of every random start and sample")
        sub.add_argument("--out", default=".", help="Output folder (default: current folder)")
        if task in GRID_TASKS:
            sub.add_argument("--grid-refine", type=int, required=False, help="Multiplier on the grid resolution")
        if task == "check":
            sub.add_argument("--family", required=False, help="convex-concave, two-parameter or zero-mass")
    return parser


def output_paths(task: str, out_dir: str, properties: dict) -> dict:
    paths = {key: os.path.join(out_dir, name) for key, name in TASKS[task][1].items()}
    if task == "quotient" and not properties.get("profile"):
        paths.pop("output_profile_path")
    if task == "check":
        family = properties.get("family", "convex-concave")
        paths["output_check_path"] = os.path.join(out_dir, "check_%s.json" % family)
    return paths


def run(task: str, properties: dict, out_dir: str = ".") -> int:
    """Runs one subcommand; validation errors exit with status 1, numerical failures return 2."""
    if not os.path.isdir(out_dir):
        raise SystemExit("nehari_rq: --out: %s is not a folder" % out_dir)
    wrapper = TASKS[task][0]
    paths = output_paths(task, out_dir, properties)
    return_code = wrapper(properties=properties, **paths)
    print("%s: %s -> %s" % (task, "ok" if return_code == 0 else "failed (%d)" % return_code, ", ".join(sorted(paths.values()))))
    return return_code


def main(argv: Optional[List[str]] = None):
    """Command line execution of the nehari subcommands."""
    args = build_parser().parse_args(argv)
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()
    if args.seed is not None:
        properties["seed"] = args.seed
    if getattr(args, "grid_refine", None) is not None:
        properties["grid_refine"] = args.grid_refine
    if getattr(args, "family", None):
        properties["family"] = args.family
    raise SystemExit(run(args.task, properties, args.out))


if __name__ == "__main__":
    main()
