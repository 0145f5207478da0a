#!/usr/bin/env python3

"""Module containing the Extremal class and the command line interface."""

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
    get_family,
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import extremal as ne
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError
from biobb_nehari.nehari_lib.quotients import monomial

TARGETS = {
    "rayleigh": None,
    "lambda_star": "convex-concave",
    "lambda_n_star": "two-parameter",
    "lambda_e_star": "two-parameter",
    "mu": "two-parameter",
}


class Extremal(BiobbObject):
    """
    | biobb_nehari Extremal
    | Class to estimate the extremal value of a quotient over a grid.
    | Minimizes a 0-homogeneous quotient (lambda*, lambda_n*, lambda_e*, the mu quotients or the classical Rayleigh quotient) by normalized multi-start descent and reports the estimate with its diagnostics.

    Args:
        output_extremal_path (str): Output extremal value file path. File type: output. Accepted formats: json (edam:format_3464).
        output_minimizer_path (str) (Optional): Output minimizer with header index,coord...,value. File type: output. Accepted formats: csv (edam:format_3752).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **target** (*str*) - ("lambda_star") Quotient to minimize. Values: rayleigh (classical eigenvalue), lambda_star (convex-concave), lambda_n_star, lambda_e_star, mu (two-parameter).
            * **family** (*str*) - (None) Energy family. Defaults to the family of the target.
            * **exponents** (*dict*) - (None) Exponents q, p, gamma (and alpha for the two-parameter family).
            * **domain** (*dict*) - ({"kind": "interval", "extent": [1.0], "resolution": [101], "dimension": 1}) Grid: kind (interval, rectangle, radial), extent, resolution, dimension.
            * **grid_refine** (*int*) - (1) Multiplier on the number of cells per axis.
            * **lambda** (*float*) - (None) Parameter lambda of the mu target.
            * **sign** (*str*) - ("+") Root of the mu target. Values: + (smaller scale), - (larger scale).
            * **flavor** (*str*) - ("n") Quotient flavor of the mu target. Values: n (Nehari), e (energy level).
            * **bound** (*float*) - (None) Known lambda-extremal value bounding lambda for the mu target. Estimated when missing.
            * **starts** (*int*) - (4) Number of descent starts.
            * **max_iter** (*int*) - (2000) Iterations per start.
            * **tol_grad** (*float*) - (1e-7) Relative gradient tolerance.
            * **seed** (*int*) - (0) Seed of the random starts.
            * **refinement** (*list*) - (None) Grid multipliers of an optional refinement study.
            * **audit_trials** (*int*) - (0) Seeded trial functions of an optional infimum-bound audit.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.extremal import extremal
            prop = {
                'target': 'lambda_star',
                'exponents': {'q': 1.5, 'p': 2.0, 'gamma': 3.0},
                'domain': {'kind': 'interval', 'extent': [1.0], 'resolution': [101]},
                'seed': 0
            }
            extremal(output_extremal_path='/path/to/extremal.json',
                     output_minimizer_path='/path/to/minimizer.csv',
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
        self, output_extremal_path, output_minimizer_path=None, properties=None, **kwargs
    ) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {},
            "out": {
                "output_extremal_path": output_extremal_path,
                "output_minimizer_path": output_minimizer_path,
            },
        }

        # Properties specific for BB
        self.target = properties.get("target", "lambda_star")
        self.family = properties.get("family")
        self.exponents = properties.get("exponents")
        self.domain = properties.get("domain")
        self.grid_refine = properties.get("grid_refine", 1)
        self.lam = properties.get("lambda")
        self.sign = properties.get("sign", "+")
        self.flavor = properties.get("flavor", "n")
        self.bound = properties.get("bound")
        self.starts = properties.get("starts")
        self.max_iter = properties.get("max_iter")
        self.tol_grad = properties.get("tol_grad")
        self.seed = properties.get("seed", 0)
        self.refinement = properties.get("refinement")
        self.audit_trials = properties.get("audit_trials", 0)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    def _estimator(self, exponents, options):
        """Returns ``(estimate(domain), quotient)`` for the configured target."""
        if self.target == "rayleigh":
            return (lambda d: ne.minimize_quotient(ne.rayleigh_quotient(), d, options, "rayleigh")), ne.rayleigh_quotient()
        if self.target == "lambda_star":
            return (lambda d: ne.lambda_star(d, exponents, options)), ne.monomial_quotient(monomial("lambda", exponents))
        if self.target == "lambda_n_star":
            return (lambda d: ne.lambda_n_star(d, exponents, options)), ne.monomial_quotient(monomial("lambda_n", exponents))
        if self.target == "lambda_e_star":
            return (lambda d: ne.lambda_e_star(d, exponents, options)), ne.monomial_quotient(monomial("lambda_e4", exponents))
        lam = get_number(self.lam, "lambda")
        bound = get_number(self.bound, "bound", required=False)
        quotient = ne.mu_quotient(exponents, lam, self.sign, self.flavor)
        return (
            lambda d: ne.mu_extremal(d, exponents, lam, self.sign, self.flavor, options, bound)
        ), quotient

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`Extremal <nehari.extremal.Extremal>` nehari.extremal.Extremal object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_extremal_path"], self.out_log, classname)
        minimizer_path = self.io_dict["out"]["output_minimizer_path"]
        if minimizer_path:
            check_output_path(minimizer_path, self.out_log, classname, ("csv",))

        # Business code
        try:
            if self.target not in TARGETS:
                raise InvalidInputError("target: must be one of %s" % ", ".join(TARGETS))
            family = get_family(self.family or TARGETS[self.target] or "convex-concave")
            if TARGETS[self.target] and family != TARGETS[self.target]:
                raise InvalidInputError("family: %s needs the %s family" % (self.target, TARGETS[self.target]))
            exponents = get_exponents(self.exponents, family) if TARGETS[self.target] else None
            domain = get_domain(self.domain, self.grid_refine)
            options = get_descent_options(self.starts, self.max_iter, self.tol_grad, self.seed)
            estimator, quotient = self._estimator(exponents, options)
            factors = [int(f) for f in self.refinement or []]
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        record = {"target": self.target, "family": family if exponents else None}
        if exponents:
            record["exponents"] = exponents.to_dict()
        try:
            estimate = estimator(domain)
            record.update(estimate.to_dict())
            fu.log(
                "%s %s: value=%.10g starts=%d converged=%s"
                % (classname, estimate.name, estimate.value, estimate.starts, estimate.converged),
                self.out_log,
                self.global_log,
            )
            if not estimate.converged:
                fu.log(
                    "%s: WARNING best start stopped with relative gradient %.3g" % (classname, estimate.final_gradient),
                    self.out_log,
                    self.global_log,
                )
            if factors:
                record["refinement"] = ne.refinement_study(estimator, domain, factors)
            if self.audit_trials:
                record["audit"] = ne.audit(estimate, quotient, int(self.audit_trials), int(self.seed))
            if minimizer_path:
                write_text_atomic(minimizer_path, gf.to_csv_text(estimate.minimizer))
            self.return_code = 0
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)
        except NehariError as error:
            record.update(failure(error, self.out_log, classname))
            self.return_code = 2

        write_json_atomic(self.io_dict["out"]["output_extremal_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def extremal(
    output_extremal_path: str,
    output_minimizer_path: Optional[str] = None,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`Extremal <nehari.extremal.Extremal>` class and
    execute the :meth:`launch() <nehari.extremal.Extremal.launch>` method."""

    return Extremal(
        output_extremal_path=output_extremal_path,
        output_minimizer_path=output_minimizer_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Estimate the extremal value of a quotient over a grid.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )
    parser.add_argument("--output_minimizer_path", required=False, help="Output minimizer CSV file name")

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_extremal_path", required=True, help="Output extremal value JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = extremal(
        output_extremal_path=args.output_extremal_path,
        output_minimizer_path=args.output_minimizer_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
