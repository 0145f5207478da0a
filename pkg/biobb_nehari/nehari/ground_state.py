#!/usr/bin/env python3

"""Module containing the GroundState class and the command line interface."""

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
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import nehari as nn
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError


class GroundState(BiobbObject):
    """
    | biobb_nehari GroundState
    | Class to compute a minimizer of the energy on one part of the Nehari manifold.
    | Minimizes the fibering-projected energy over the plus or minus part of the convex-concave Nehari manifold, or over the RN1 / RN2 constraint sets of the two-parameter energy, then verifies the result.

    Args:
        output_solution_path (str): Output solution summary and verification report. File type: output. Accepted formats: json (edam:format_3464).
        output_function_path (str) (Optional): Output solution with header index,coord...,value. File type: output. Accepted formats: csv (edam:format_3752).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **branch** (*str*) - ("plus") Part of the manifold. Values: plus, minus (convex-concave), rn1, rn2 (two-parameter).
            * **exponents** (*dict*) - (None) Exponents q, p, gamma (and alpha for rn1 / rn2).
            * **domain** (*dict*) - ({"kind": "interval", "extent": [1.0], "resolution": [101], "dimension": 1}) Grid: kind, extent, resolution, dimension.
            * **grid_refine** (*int*) - (1) Multiplier on the number of cells per axis.
            * **lambda** (*float*) - (None) Parameter lambda.
            * **mu** (*float*) - (None) Parameter mu of rn1 / rn2.
            * **window** (*dict*) - (None) Known lambda_bound, mu_low, mu_high of rn1 / rn2. Estimated from the extremal values when missing.
            * **starts** (*int*) - (4) Number of descent starts.
            * **max_iter** (*int*) - (5000) Iterations per start.
            * **tol_grad** (*float*) - (1e-10) Relative gradient tolerance.
            * **tol_res** (*float*) - (1e-6) Residual tolerance of the verification.
            * **seed** (*int*) - (0) Seed of the random starts.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.ground_state import ground_state
            prop = {
                'branch': 'plus',
                'exponents': {'q': 1.5, 'p': 2.0, 'gamma': 3.0},
                'lambda': 5.0
            }
            ground_state(output_solution_path='/path/to/solution.json',
                         output_function_path='/path/to/solution.csv',
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
        self, output_solution_path, output_function_path=None, properties=None, **kwargs
    ) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {},
            "out": {
                "output_solution_path": output_solution_path,
                "output_function_path": output_function_path,
            },
        }

        # Properties specific for BB
        self.branch = properties.get("branch", "plus")
        self.exponents = properties.get("exponents")
        self.domain = properties.get("domain")
        self.grid_refine = properties.get("grid_refine", 1)
        self.lam = properties.get("lambda")
        self.mu = properties.get("mu")
        self.window = properties.get("window")
        self.starts = properties.get("starts")
        self.max_iter = properties.get("max_iter")
        self.tol_grad = properties.get("tol_grad")
        self.tol_res = properties.get("tol_res", nn.TOL_RES)
        self.seed = properties.get("seed", 0)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`GroundState <nehari.ground_state.GroundState>` nehari.ground_state.GroundState object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_solution_path"], self.out_log, classname)
        function_path = self.io_dict["out"]["output_function_path"]
        if function_path:
            check_output_path(function_path, self.out_log, classname, ("csv",))

        # Business code
        try:
            if self.branch not in nn.BRANCHES:
                raise InvalidInputError("branch: must be one of %s" % ", ".join(nn.BRANCHES))
            three = self.branch in ("rn1", "rn2")
            exponents = get_exponents(self.exponents, "two-parameter" if three else "convex-concave")
            domain = get_domain(self.domain, self.grid_refine)
            lam = get_number(self.lam, "lambda")
            mu = get_number(self.mu, "mu", required=three)
            tol_res = get_number(self.tol_res, "tol_res")
            options = get_descent_options(self.starts, self.max_iter, self.tol_grad, self.seed, nn.SOLVER_DESCENT)
            if self.window is not None and not all(k in self.window for k in ("lambda_bound", "mu_low", "mu_high")):
                raise InvalidInputError("window: needs lambda_bound, mu_low and mu_high")
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        record = {"branch": self.branch, "exponents": exponents.to_dict(), "grid": domain.to_dict()}
        try:
            if three:
                solution = nn.solve_three_term(lam, mu, self.branch, domain, exponents, options, self.window, tol_res=tol_res)
            else:
                solution = nn.solve_M(lam, self.branch, domain, exponents, options, tol_res=tol_res)
            report = nn.verify(solution, tol_res)
            record.update(solution.to_dict())
            record["verification"] = report.to_dict()
            fu.log(
                "%s %s: energy=%.10g residual=%.3g admissible=%s"
                % (classname, self.branch, solution.energy, solution.residual, solution.admissible),
                self.out_log,
                self.global_log,
            )
            if not report.passed:
                fu.log("%s: WARNING failed checks %s" % (classname, report.failed()), self.out_log, self.global_log)
            if solution.degenerate:
                fu.log("%s: WARNING solution is degenerate (phi2 near 0)" % classname, self.out_log, self.global_log)
            if function_path:
                write_text_atomic(function_path, gf.to_csv_text(solution.u))
            self.return_code = 0
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)
        except NehariError as error:
            record.update(failure(error, self.out_log, classname))
            self.return_code = 2

        write_json_atomic(self.io_dict["out"]["output_solution_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def ground_state(
    output_solution_path: str,
    output_function_path: Optional[str] = None,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`GroundState <nehari.ground_state.GroundState>` class and
    execute the :meth:`launch() <nehari.ground_state.GroundState.launch>` method."""

    return GroundState(
        output_solution_path=output_solution_path,
        output_function_path=output_function_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Compute a minimizer of the energy on one part of the Nehari manifold.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )
    parser.add_argument("--output_function_path", required=False, help="Output solution CSV file name")

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_solution_path", required=True, help="Output solution JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = ground_state(
        output_solution_path=args.output_solution_path,
        output_function_path=args.output_function_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
