#!/usr/bin/env python3

"""Module containing the Branch class and the command line interface."""

import argparse
from typing import Optional

from biobb_common.configuration import settings
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools import file_utils as fu
from biobb_common.tools.file_utils import launchlogger

from biobb_nehari.nehari.common import (
    check_output_path,
    failure,
    get_descent_options,
    get_domain,
    get_exponents,
    get_grid,
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import nehari as nn
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError


class Branch(BiobbObject):
    """
    | biobb_nehari Branch
    | Class to follow a solution branch along a parameter grid.
    | Warm-started continuation of Nehari-manifold minimizers in lambda (plus, minus) or in mu at fixed lambda (rn1, rn2); the first failure is bracketed by bisection against the last admissible value.

    Args:
        output_branch_path (str): Output branch diagram with header lambda,mu,energy,norm_gamma,residual,admissible,phi2. File type: output. Accepted formats: csv (edam:format_3752).
        output_summary_path (str): Output branch summary (numerical limit and its bracket). File type: output. Accepted formats: json (edam:format_3464).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **branch** (*str*) - ("plus") Branch to follow. Values: plus, minus (lambda sweep), rn1, rn2 (mu sweep).
            * **grid** (*list*) - (None) Increasing positive parameter values, or a mapping with start, stop and num.
            * **exponents** (*dict*) - (None) Exponents q, p, gamma (and alpha for rn1 / rn2).
            * **domain** (*dict*) - ({"kind": "interval", "extent": [1.0], "resolution": [101], "dimension": 1}) Grid: kind, extent, resolution, dimension.
            * **grid_refine** (*int*) - (1) Multiplier on the number of cells per axis.
            * **lambda** (*float*) - (None) Fixed lambda of a mu sweep.
            * **bisect_steps** (*int*) - (20) Bisection steps bracketing the first failure.
            * **bracket_tol** (*float*) - (1e-3) Relative width at which bisection stops.
            * **starts** (*int*) - (4) Number of descent starts.
            * **max_iter** (*int*) - (5000) Iterations per start.
            * **tol_grad** (*float*) - (1e-10) Relative gradient tolerance.
            * **seed** (*int*) - (0) Seed of the random starts.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.branch import branch
            prop = {
                'branch': 'plus',
                'exponents': {'q': 1.5, 'p': 2.0, 'gamma': 3.0},
                'grid': {'start': 1.0, 'stop': 20.0, 'num': 20}
            }
            branch(output_branch_path='/path/to/branch.csv',
                   output_summary_path='/path/to/branch.json',
                   properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(
        self, output_branch_path, output_summary_path, properties=None, **kwargs
    ) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {},
            "out": {
                "output_branch_path": output_branch_path,
                "output_summary_path": output_summary_path,
            },
        }

        # Properties specific for BB
        self.branch = properties.get("branch", "plus")
        self.grid = properties.get("grid")
        self.exponents = properties.get("exponents")
        self.domain = properties.get("domain")
        self.grid_refine = properties.get("grid_refine", 1)
        self.lam = properties.get("lambda")
        self.bisect_steps = properties.get("bisect_steps", 20)
        self.bracket_tol = properties.get("bracket_tol", 1e-3)
        self.starts = properties.get("starts")
        self.max_iter = properties.get("max_iter")
        self.tol_grad = properties.get("tol_grad")
        self.seed = properties.get("seed", 0)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`Branch <nehari.branch.Branch>` nehari.branch.Branch object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_branch_path"], self.out_log, classname, ("csv",))
        check_output_path(self.io_dict["out"]["output_summary_path"], self.out_log, classname)

        # Business code
        try:
            if self.branch not in nn.BRANCHES:
                raise InvalidInputError("branch: must be one of %s" % ", ".join(nn.BRANCHES))
            three = self.branch in ("rn1", "rn2")
            exponents = get_exponents(self.exponents, "two-parameter" if three else "convex-concave")
            domain = get_domain(self.domain, self.grid_refine)
            grid = get_grid(self.grid)
            lam = get_number(self.lam, "lambda", required=three)
            bracket_tol = get_number(self.bracket_tol, "bracket_tol")
            bisect_steps = self.bisect_steps
            if isinstance(bisect_steps, bool) or not isinstance(bisect_steps, int) or bisect_steps < 0:
                raise InvalidInputError("bisect_steps: must be a nonnegative integer")
            options = get_descent_options(self.starts, self.max_iter, self.tol_grad, self.seed, nn.SOLVER_DESCENT)
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        record = {"branch": self.branch, "exponents": exponents.to_dict(), "grid": domain.to_dict(), "values": grid}
        diagram = nn.BranchDiagram(self.branch, "mu" if three else "lambda")
        try:
            diagram = nn.continue_branch(
                grid, self.branch, domain, exponents, options, lam,
                bisect_steps=bisect_steps, bracket_tol=bracket_tol,
            )
            self.return_code = 0
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)
        except NehariError as error:
            record.update(failure(error, self.out_log, classname))
            self.return_code = 2
        record.update(diagram.to_dict())
        record["status"] = [row.status for row in diagram.rows]
        fu.log(
            "%s %s: %d rows, %d admissible, limit=%s"
            % (classname, self.branch, record["rows"], record["admissible_rows"], diagram.limit_numeric),
            self.out_log,
            self.global_log,
        )

        write_text_atomic(self.io_dict["out"]["output_branch_path"], diagram.to_csv_text())
        write_json_atomic(self.io_dict["out"]["output_summary_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def branch(
    output_branch_path: str,
    output_summary_path: str,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`Branch <nehari.branch.Branch>` class and
    execute the :meth:`launch() <nehari.branch.Branch.launch>` method."""

    return Branch(
        output_branch_path=output_branch_path,
        output_summary_path=output_summary_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Follow a solution branch along a parameter grid.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_branch_path", required=True, help="Output branch diagram CSV file name"
    )
    required_args.add_argument(
        "--output_summary_path", required=True, help="Output branch summary JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = branch(
        output_branch_path=args.output_branch_path,
        output_summary_path=args.output_summary_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
