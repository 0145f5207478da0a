#!/usr/bin/env python3

"""Module containing the Quotient class and the command line interface."""

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
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError
from biobb_nehari.nehari_lib.fibering import FiberCoefficients, geometric_grid

DEFAULT_QUOTIENTS = {
    "convex-concave": ["lambda", "lambda_e"],
    "two-parameter": ["lambda_n", "lambda_e4"],
}
MU_QUOTIENTS = {"mu_n": "n", "mu_e": "e"}


class Quotient(BiobbObject):
    """
    | biobb_nehari Quotient
    | Class to evaluate nonlinear generalized Rayleigh quotients.
    | Evaluates the closed-form quotients lambda, lambda_e (convex-concave) or lambda_n, lambda_e4 and the mu quotient pairs (two-parameter) of a function, with their realizing scale t.

    Args:
        output_quotient_path (str): Output quotient values file path. File type: output. `Sample file <https://github.com/bioexcel/biobb_nehari/raw/master/biobb_nehari/test/reference/nehari/ref_quotient.json>`_. Accepted formats: json (edam:format_3464).
        output_profile_path (str) (Optional): Output quotient profile along the fiber with header t,value. File type: output. Accepted formats: csv (edam:format_3752).
        input_function_path (str) (Optional): Grid function whose integrals give the coefficients. File type: input. `Sample file <https://github.com/bioexcel/biobb_nehari/raw/master/biobb_nehari/test/data/nehari/hat_function.csv>`_. Accepted formats: csv (edam:format_3752).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **family** (*str*) - ("convex-concave") Energy family. Values: convex-concave, two-parameter.
            * **exponents** (*dict*) - (None) Exponents q, p, gamma (and alpha for the two-parameter family).
            * **coefficients** (*dict*) - ({"a": 1.0, "b_q": 1.0, "c": 1.0}) Integrals a, b_q, c (and b_alpha). Ignored when input_function_path is given.
            * **domain** (*dict*) - (None) Grid of input_function_path: kind, extent, resolution, dimension.
            * **grid_refine** (*int*) - (1) Multiplier on the number of cells per axis of the domain.
            * **quotients** (*list*) - (None) Quotients to evaluate. Values: lambda, lambda_e (convex-concave), lambda_n, lambda_e4, mu_n, mu_e (two-parameter). Defaults to the closed-form quotients of the family.
            * **lambda** (*float*) - (None) Parameter lambda of the mu quotients and of the rn_lambda, re_lambda profiles.
            * **profile** (*str*) - (None) Quotient written to output_profile_path. Values: rn, re (convex-concave), rn_lambda, re_lambda, Lambda_n, Lambda_e (two-parameter).
            * **t_min** (*float*) - (1e-4) First t of the profile.
            * **t_max** (*float*) - (1e3) Last t of the profile.
            * **points** (*int*) - (1000) Rows of the profile.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.quotient import quotient
            prop = {
                'family': 'two-parameter',
                'exponents': {'q': 1.2, 'alpha': 1.5, 'p': 2.0, 'gamma': 3.0},
                'quotients': ['lambda_n', 'lambda_e4', 'mu_n'],
                'lambda': 0.1
            }
            quotient(output_quotient_path='/path/to/quotient.json',
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
        output_quotient_path,
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
                "output_quotient_path": output_quotient_path,
                "output_profile_path": output_profile_path,
            },
        }

        # Properties specific for BB
        self.family = properties.get("family", "convex-concave")
        self.exponents = properties.get("exponents")
        self.coefficients = properties.get("coefficients")
        self.domain = properties.get("domain")
        self.grid_refine = properties.get("grid_refine", 1)
        self.quotients = properties.get("quotients")
        self.lam = properties.get("lambda")
        self.profile = properties.get("profile")
        self.t_min = properties.get("t_min", 1e-4)
        self.t_max = properties.get("t_max", 1e3)
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

    def _names(self, family):
        names = list(self.quotients or DEFAULT_QUOTIENTS[family])
        allowed = DEFAULT_QUOTIENTS[family] + (list(MU_QUOTIENTS) if family == "two-parameter" else [])
        for name in names:
            if name not in allowed:
                raise InvalidInputError("quotients: %r is not a %s quotient" % (name, family))
        return names

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`Quotient <nehari.quotient.Quotient>` nehari.quotient.Quotient object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_quotient_path"], self.out_log, classname)
        profile_path = self.io_dict["out"]["output_profile_path"]
        if profile_path:
            check_output_path(profile_path, self.out_log, classname, ("csv",))

        # Business code
        try:
            family = get_family(self.family)
            if family == "zero-mass":
                raise InvalidInputError("family: use the ZeroMass block for the zero-mass quotients")
            exponents = get_exponents(self.exponents, family)
            names = self._names(family)
            needs_lambda = any(n in MU_QUOTIENTS for n in names) or self.profile in ("rn_lambda", "re_lambda")
            lam = get_number(self.lam, "lambda", required=needs_lambda)
            coeffs = self._coefficients(exponents)
            if profile_path and not self.profile:
                raise InvalidInputError("profile: required with output_profile_path")
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        record = {
            "family": family,
            "exponents": exponents.to_dict(),
            "inputs": {"a": coeffs.a, "b_q": coeffs.b_q, "c": coeffs.c, "b_alpha": coeffs.b_alpha, "lambda": lam},
            "printed_constants": nq.printed_constants(exponents),
            "quotients": [],
        }
        self.return_code = 0
        for name in names:
            try:
                if name in MU_QUOTIENTS:
                    values = nq.mu_pm_quotients(coeffs, lam, MU_QUOTIENTS[name])
                else:
                    values = (nq.closed_form_quotient(name, coeffs),)
            except NehariError as error:
                record["quotients"].append(dict(failure(error, self.out_log, classname), name=name))
                self.return_code = 2
                continue
            for value in values:
                record["quotients"].append(value.to_dict())
                fu.log(
                    "%s %s: value=%.10g t=%.10g" % (classname, value.name, value.value, value.t),
                    self.out_log,
                    self.global_log,
                )

        if profile_path:
            try:
                grid = geometric_grid(float(self.t_min), float(self.t_max), int(self.points))
                rows = nq.profile(coeffs, self.profile, grid, lam)
            except InvalidInputError as error:
                invalid(error, self.out_log, classname)
            write_text_atomic(profile_path, "t,value\n" + "".join("%.17g,%.17g\n" % tuple(r) for r in rows))
        write_json_atomic(self.io_dict["out"]["output_quotient_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def quotient(
    output_quotient_path: str,
    output_profile_path: Optional[str] = None,
    input_function_path: Optional[str] = None,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`Quotient <nehari.quotient.Quotient>` class and
    execute the :meth:`launch() <nehari.quotient.Quotient.launch>` method."""

    return Quotient(
        output_quotient_path=output_quotient_path,
        output_profile_path=output_profile_path,
        input_function_path=input_function_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Evaluate nonlinear generalized Rayleigh quotients.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )
    parser.add_argument("--output_profile_path", required=False, help="Output quotient profile CSV file name")
    parser.add_argument("--input_function_path", required=False, help="Input grid function CSV file name")

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_quotient_path", required=True, help="Output quotient values JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = quotient(
        output_quotient_path=args.output_quotient_path,
        output_profile_path=args.output_profile_path,
        input_function_path=args.input_function_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
