#!/usr/bin/env python3

"""Module containing the Fiber class and the command line interface."""

import argparse
from typing import Optional

from biobb_common.configuration import settings
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools import file_utils as fu
from biobb_common.tools.file_utils import launchlogger

from biobb_nehari.nehari.common import (
    check_input_path,
    check_output_path,
    failure,
    get_coefficients,
    get_domain,
    get_exponents,
    get_family,
    get_fiber_options,
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError
from biobb_nehari.nehari_lib.fibering import (
    FiberCoefficients,
    critical_points,
    fiber_profile,
    geometric_grid,
)


class Fiber(BiobbObject):
    """
    | biobb_nehari Fiber
    | Class to locate and classify the critical points of a fibering map.
    | Finds every positive critical point of t -> Phi(t u) for the convex-concave or the two-parameter energy, classifies them by the sign of the second derivative and optionally dumps the fiber profile.

    Args:
        output_fiber_path (str): Output critical points file path. File type: output. Accepted formats: json (edam:format_3464).
        output_profile_path (str) (Optional): Output fiber profile with header t,phi,dphi,ddphi. File type: output. Accepted formats: csv (edam:format_3752).
        input_function_path (str) (Optional): Grid function whose integrals give the fiber coefficients. File type: input. `Sample file <https://github.com/bioexcel/biobb_nehari/raw/master/biobb_nehari/test/data/nehari/hat_function.csv>`_. Accepted formats: csv (edam:format_3752).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **family** (*str*) - ("convex-concave") Energy family. Values: convex-concave (three terms q < p < gamma), two-parameter (four terms q < alpha < p < gamma).
            * **exponents** (*dict*) - (None) Exponents q, p, gamma (and alpha for the two-parameter family). Defaults to q=1.5, p=2, gamma=3 or q=1.2, alpha=1.5, p=2, gamma=3.
            * **coefficients** (*dict*) - ({"a": 1.0, "b_q": 1.0, "c": 1.0}) Integrals a, b_q, c (and b_alpha). Ignored when input_function_path is given.
            * **domain** (*dict*) - (None) Grid of input_function_path: kind, extent, resolution, dimension.
            * **grid_refine** (*int*) - (1) Multiplier on the number of cells per axis of the domain.
            * **lambda** (*float*) - (None) Parameter lambda.
            * **mu** (*float*) - (None) Parameter mu, two-parameter family only.
            * **t_min** (*float*) - (1e-4) Lower end of the bracketing window.
            * **t_max** (*float*) - (1e3) Upper end of the bracketing window.
            * **brackets** (*int*) - (512) Geometric breakpoints used to isolate roots.
            * **tol_root** (*float*) - (1e-10) Relative tolerance on Phi' at a critical point.
            * **points** (*int*) - (1000) Rows of the fiber profile.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.fiber import fiber
            prop = {
                'family': 'convex-concave',
                'exponents': {'q': 1.5, 'p': 2.0, 'gamma': 3.0},
                'lambda': 0.2
            }
            fiber(output_fiber_path='/path/to/fiber.json',
                  output_profile_path='/path/to/profile.csv',
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
        self,
        output_fiber_path,
        output_profile_path=None,
        input_function_path=None,
        properties=None,
        **kwargs,
    ) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {"input_function_path": input_function_path},
            "out": {
                "output_fiber_path": output_fiber_path,
                "output_profile_path": output_profile_path,
            },
        }

        # Properties specific for BB
        self.family = properties.get("family", "convex-concave")
        self.exponents = properties.get("exponents")
        self.coefficients = properties.get("coefficients")
        self.domain = properties.get("domain")
        self.grid_refine = properties.get("grid_refine", 1)
        self.lam = properties.get("lambda")
        self.mu = properties.get("mu")
        self.t_min = properties.get("t_min", 1e-4)
        self.t_max = properties.get("t_max", 1e3)
        self.brackets = properties.get("brackets", 512)
        self.tol_root = properties.get("tol_root", 1e-10)
        self.points = properties.get("points", 1000)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    def _coefficients(self, exponents) -> FiberCoefficients:
        path = self.io_dict["in"]["input_function_path"]
        if not path:
            return get_coefficients(self.coefficients, exponents)
        check_input_path(path, self.out_log, self.__class__.__name__)
        u = gf.read_csv(self.stage_io_dict["in"]["input_function_path"], get_domain(self.domain, self.grid_refine))
        return FiberCoefficients.from_function(u, exponents)

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`Fiber <nehari.fiber.Fiber>` nehari.fiber.Fiber object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_fiber_path"], self.out_log, classname)
        if self.io_dict["out"]["output_profile_path"]:
            check_output_path(self.io_dict["out"]["output_profile_path"], self.out_log, classname, ("csv",))

        # Business code
        try:
            family = get_family(self.family)
            if family == "zero-mass":
                raise InvalidInputError("family: fibering maps are defined for convex-concave and two-parameter")
            exponents = get_exponents(self.exponents, family)
            lam = get_number(self.lam, "lambda")
            mu = get_number(self.mu, "mu", required=family == "two-parameter")
            options = get_fiber_options(self.t_min, self.t_max, self.brackets, self.tol_root)
            coeffs = self._coefficients(exponents)
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        record = {
            "family": family,
            "exponents": exponents.to_dict(),
            "coefficients": {"a": coeffs.a, "b_q": coeffs.b_q, "c": coeffs.c, "b_alpha": coeffs.b_alpha},
            "lambda": lam,
            "mu": mu,
        }
        try:
            points = critical_points(coeffs, lam, mu, options)
            record.update(
                {
                    "count": len(points),
                    "degenerate": points.degenerate,
                    "critical_points": [
                        {"t": p.t, "sign": p.sign, "dphi": p.dphi, "ddphi": p.ddphi} for p in points
                    ],
                    "bracketing_intervals": [list(b) for b in points.bracketing_intervals],
                }
            )
            fu.log(
                "%s: %d critical points at t=%s signs=%s" % (classname, len(points), points.ts, points.signs),
                self.out_log,
                self.global_log,
            )
            if points.degenerate:
                fu.log("%s: WARNING degenerate critical point found" % classname, self.out_log, self.global_log)
            self.return_code = 0
        except NehariError as error:
            record.update(failure(error, self.out_log, classname))
            self.return_code = 2

        if self.io_dict["out"]["output_profile_path"]:
            rows = fiber_profile(coeffs, lam, mu, geometric_grid(options.t_min, options.t_max, int(self.points)))
            text = "t,phi,dphi,ddphi\n" + "".join("%.17g,%.17g,%.17g,%.17g\n" % tuple(row) for row in rows)
            write_text_atomic(self.io_dict["out"]["output_profile_path"], text)
        write_json_atomic(self.io_dict["out"]["output_fiber_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def fiber(
    output_fiber_path: str,
    output_profile_path: Optional[str] = None,
    input_function_path: Optional[str] = None,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`Fiber <nehari.fiber.Fiber>` class and
    execute the :meth:`launch() <nehari.fiber.Fiber.launch>` method."""

    return Fiber(
        output_fiber_path=output_fiber_path,
        output_profile_path=output_profile_path,
        input_function_path=input_function_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Locate and classify the critical points of a fibering map.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )
    parser.add_argument("--output_profile_path", required=False, help="Output fiber profile CSV file name")
    parser.add_argument("--input_function_path", required=False, help="Input grid function CSV file name")

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_fiber_path", required=True, help="Output critical points JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = fiber(
        output_fiber_path=args.output_fiber_path,
        output_profile_path=args.output_profile_path,
        input_function_path=args.input_function_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
