#!/usr/bin/env python3

"""Module containing the NehariCheck class and the command line interface."""

import argparse
from typing import Optional

from biobb_common.configuration import settings
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools import file_utils as fu
from biobb_common.tools.file_utils import launchlogger

from biobb_nehari.nehari.common import (
    check_output_path,
    get_exponents,
    get_family,
    invalid,
    write_json_atomic,
)
from biobb_nehari.nehari_lib import checks
from biobb_nehari.nehari_lib.errors import InvalidInputError
from biobb_nehari.nehari_lib.zeromass import ZeroMassParams


class NehariCheck(BiobbObject):
    """
    | biobb_nehari NehariCheck
    | Class to run the property suites of a problem family.
    | Runs the worked examples, closed form against dense scans, homogeneity, ordering, critical-point census and gradient suites of one family on seeded random samples. The return code is 2 when any suite fails.

    Args:
        output_check_path (str): Output suite report. File type: output. Accepted formats: json (edam:format_3464).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **family** (*str*) - ("convex-concave") Family to check. Values: convex-concave, two-parameter, zero-mass.
            * **exponents** (*dict*) - (None) Exponents of the random samples. Defaults to q=1.5, p=2, gamma=3 or q=1.2, alpha=1.5, p=2, gamma=3.
            * **zero_mass** (*dict*) - ({"N": 3, "p": 4.0, "q": 3.0, "E": 1.0}) Zero-mass problem of the zero-mass suites.
            * **samples** (*int*) - (100) Random coefficient tuples per suite.
            * **seed** (*int*) - (0) Seed of the random samples.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.nehari_check import nehari_check
            prop = {
                'family': 'convex-concave',
                'samples': 100,
                'seed': 0
            }
            nehari_check(output_check_path='/path/to/check.json',
                         properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_check_path, properties=None, **kwargs) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {},
            "out": {"output_check_path": output_check_path},
        }

        # Properties specific for BB
        self.family = properties.get("family", "convex-concave")
        self.exponents = properties.get("exponents")
        self.zero_mass = properties.get("zero_mass", {"N": 3, "p": 4.0, "q": 3.0, "E": 1.0})
        self.samples = properties.get("samples", 100)
        self.seed = properties.get("seed", 0)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`NehariCheck <nehari.nehari_check.NehariCheck>` nehari.nehari_check.NehariCheck object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_check_path"], self.out_log, classname)

        # Business code
        try:
            family = get_family(self.family)
            if family == "zero-mass":
                subject = ZeroMassParams.from_dict(self.zero_mass)
            else:
                subject = get_exponents(self.exponents, family)
            if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
                raise InvalidInputError("samples: must be a positive integer")
            if isinstance(self.seed, bool) or not isinstance(self.seed, int):
                raise InvalidInputError("seed: must be an integer")
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)

        results = checks.run_suites(family, subject, self.samples, self.seed)
        for suite in results:
            fu.log(
                "%s %s: %s (%d checked, %d violations, worst %.3g)"
                % (classname, suite.name, "passed" if suite.passed else "FAILED",
                   suite.checked, suite.violations, suite.worst),
                self.out_log,
                self.global_log,
            )
        passed = all(suite.passed for suite in results)
        record = {
            "family": family,
            "samples": self.samples,
            "seed": self.seed,
            "passed": passed,
            "suites": [suite.to_dict() for suite in results],
        }
        write_json_atomic(self.io_dict["out"]["output_check_path"], record)
        self.return_code = 0 if passed else 2
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def nehari_check(output_check_path: str, properties: Optional[dict] = None, **kwargs) -> int:
    """Execute the :class:`NehariCheck <nehari.nehari_check.NehariCheck>` class and
    execute the :meth:`launch() <nehari.nehari_check.NehariCheck.launch>` method."""

    return NehariCheck(output_check_path=output_check_path, properties=properties, **kwargs).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Run the property suites of a problem family.",
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
        "-o", "--output_check_path", required=True, help="Output suite report JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = nehari_check(output_check_path=args.output_check_path, properties=properties)
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
