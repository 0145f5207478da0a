#!/usr/bin/env python3

"""Module containing the ZeroMass class and the command line interface."""

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
    get_number,
    invalid,
    write_json_atomic,
    write_text_atomic,
)
from biobb_nehari.nehari_lib import zeromass as zm
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError


class ZeroMass(BiobbObject):
    """
    | biobb_nehari ZeroMass
    | Class to compute a prescribed-energy solution of the zero-mass problem.
    | Minimizes the Gagliardo-Nirenberg quotient on a truncated radial grid, rescales the minimizer to the prescribed energy E and reports mu_hat with its checks. For p < q a nonexistence certificate is issued instead.

    Args:
        output_zero_mass_path (str): Output result {mu_bar, mu_hat, E, checks, residual} or nonexistence certificate. File type: output. Accepted formats: json (edam:format_3464).
        output_profile_path (str) (Optional): Output radial profile with header r,value. File type: output. Accepted formats: csv (edam:format_3752).
        properties (dic - Python dictionary object containing the tool parameters, not input/output files):
            * **N** (*int*) - (3) Space dimension.
            * **p** (*float*) - (4.0) Exponent of the focusing term mu |u|^(p-2) u.
            * **q** (*float*) - (3.0) Exponent of the defocusing term |u|^(q-2) u.
            * **E** (*float*) - (1.0) Prescribed energy.
            * **R** (*float*) - (30.0) Truncation radius.
            * **resolution** (*int*) - (600) Radial nodes.
            * **grid_refine** (*int*) - (1) Multiplier on the number of radial cells.
            * **tol_E** (*float*) - (1e-2) Relative tolerance on the achieved energy.
            * **samples** (*int*) - (20) Random radial functions of the nonexistence certificate.
            * **starts** (*int*) - (3) Number of descent starts.
            * **max_iter** (*int*) - (5000) Iterations per start.
            * **tol_grad** (*float*) - (1e-8) Relative gradient tolerance.
            * **seed** (*int*) - (0) Seed of the random starts and certificate samples.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_nehari.nehari.zero_mass import zero_mass
            prop = {
                'N': 3,
                'q': 3.0,
                'p': 4.0,
                'E': 1.0
            }
            zero_mass(output_zero_mass_path='/path/to/zero_mass.json',
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
        self, output_zero_mass_path, output_profile_path=None, properties=None, **kwargs
    ) -> None:
        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            "in": {},
            "out": {
                "output_zero_mass_path": output_zero_mass_path,
                "output_profile_path": output_profile_path,
            },
        }

        # Properties specific for BB
        self.problem = {
            "N": properties.get("N", 3),
            "p": properties.get("p", 4.0),
            "q": properties.get("q", 3.0),
            "E": properties.get("E", 1.0),
            "R": properties.get("R", 30.0),
            "resolution": properties.get("resolution", 600),
        }
        self.grid_refine = properties.get("grid_refine", 1)
        self.tol_E = properties.get("tol_E", 1e-2)
        self.samples = properties.get("samples", 20)
        self.starts = properties.get("starts")
        self.max_iter = properties.get("max_iter")
        self.tol_grad = properties.get("tol_grad")
        self.seed = properties.get("seed", 0)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`ZeroMass <nehari.zero_mass.ZeroMass>` nehari.zero_mass.ZeroMass object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        classname = self.__class__.__name__
        check_output_path(self.io_dict["out"]["output_zero_mass_path"], self.out_log, classname)
        profile_path = self.io_dict["out"]["output_profile_path"]
        if profile_path:
            check_output_path(profile_path, self.out_log, classname, ("csv",))

        # Business code
        try:
            if isinstance(self.grid_refine, bool) or not isinstance(self.grid_refine, int) or self.grid_refine < 1:
                raise InvalidInputError("grid_refine: must be a positive integer")
            spec = dict(self.problem)
            spec["resolution"] = (int(spec["resolution"]) - 1) * self.grid_refine + 1
            params = zm.ZeroMassParams.from_dict(spec)
            tol_E = get_number(self.tol_E, "tol_E")
            options = get_descent_options(self.starts, self.max_iter, self.tol_grad, self.seed, zm.ZERO_MASS_DESCENT)
        except (InvalidInputError, TypeError, ValueError) as error:
            invalid(error, self.out_log, classname)

        record = {"problem": params.to_dict(), "existence": params.existence}
        self.return_code = 0
        try:
            if not params.existence:
                certificate = zm.nonexistence_certificate(params, int(self.samples), int(self.seed))
                record["certificate"] = certificate.to_dict()
                record["refused"] = "no prescribed-energy solution for p < q"
                fu.log(
                    "%s: nonexistence certificate issued=%s sign_changes=%d"
                    % (classname, certificate.issued, certificate.sign_changes),
                    self.out_log,
                    self.global_log,
                )
                if not certificate.issued:
                    self.return_code = 2
            else:
                solution = zm.solve_prescribed_energy(params, options)
                record.update(solution.to_dict())
                record["relation"] = zm.relation_constant(params)
                energy_error = abs(solution.energy_achieved - params.E) / params.E
                record["energy_within_tolerance"] = energy_error < tol_E
                fu.log(
                    "%s: mu_bar=%.10g mu_hat=%.10g residual=%.3g energy=%.10g"
                    % (classname, solution.mu_bar, solution.mu_hat, solution.residual, solution.energy_achieved),
                    self.out_log,
                    self.global_log,
                )
                if solution.truncation_warning:
                    fu.log("%s: WARNING minimizer mass reaches the truncation radius" % classname, self.out_log, self.global_log)
                if not solution.converged:
                    fu.log("%s: WARNING descent did not converge" % classname, self.out_log, self.global_log)
                if profile_path:
                    write_text_atomic(profile_path, zm.profile_csv_text(solution.u))
        except InvalidInputError as error:
            invalid(error, self.out_log, classname)
        except NehariError as error:
            record.update(failure(error, self.out_log, classname))
            self.return_code = 2

        write_json_atomic(self.io_dict["out"]["output_zero_mass_path"], record)
        ##########

        # Remove temporal files
        self.tmp_files.append(self.stage_io_dict.get("unique_dir", ""))
        self.remove_tmp_files()

        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def zero_mass(
    output_zero_mass_path: str,
    output_profile_path: Optional[str] = None,
    properties: Optional[dict] = None,
    **kwargs,
) -> int:
    """Execute the :class:`ZeroMass <nehari.zero_mass.ZeroMass>` class and
    execute the :meth:`launch() <nehari.zero_mass.ZeroMass.launch>` method."""

    return ZeroMass(
        output_zero_mass_path=output_zero_mass_path,
        output_profile_path=output_profile_path,
        properties=properties,
        **kwargs,
    ).launch()


def main():
    """Command line execution of this building block. Please check the command line documentation."""
    parser = argparse.ArgumentParser(
        description="Compute a prescribed-energy solution of the zero-mass problem.",
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=99999),
    )
    parser.add_argument(
        "-c",
        "--config",
        required=False,
        help="This file can be a YAML file, JSON file or JSON string",
    )
    parser.add_argument("--output_profile_path", required=False, help="Output radial profile CSV file name")

    # Specific args of each building block
    required_args = parser.add_argument_group("required arguments")
    required_args.add_argument(
        "-o", "--output_zero_mass_path", required=True, help="Output result JSON file name"
    )

    args = parser.parse_args()
    config = args.config if args.config else None
    properties = settings.ConfReader(config=config).get_prop_dic()

    # Specific call of each building block
    return_code = zero_mass(
        output_zero_mass_path=args.output_zero_mass_path,
        output_profile_path=args.output_profile_path,
        properties=properties,
    )
    raise SystemExit(return_code)


if __name__ == "__main__":
    main()
