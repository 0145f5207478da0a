"""Common functions and constants for package biobb_nehari.nehari"""

import json
import math
import os
import tempfile
from collections.abc import Mapping
from dataclasses import replace
from pathlib import Path, PurePath
from typing import Any, List, Optional

import numpy as np
from biobb_common.tools import file_utils as fu

from biobb_nehari.nehari_lib.errors import InvalidInputError
from biobb_nehari.nehari_lib.extremal import DescentOptions
from biobb_nehari.nehari_lib.fibering import FiberCoefficients, FiberOptions, parse_exponents
from biobb_nehari.nehari_lib.gridfield import FAMILIES, Domain

DEFAULT_EXPONENTS = {
    "convex-concave": {"q": 1.5, "p": 2.0, "gamma": 3.0},
    "two-parameter": {"q": 1.2, "alpha": 1.5, "p": 2.0, "gamma": 3.0},
}
DEFAULT_DOMAIN = {"kind": "interval", "extent": [1.0], "resolution": [101], "dimension": 1}


def check_input_path(path, out_log, classname, formats=("csv",)):
    """Checks input file path"""
    if not Path(path).exists():
        fu.log(classname + ": Unexisting input file, exiting", out_log)
        raise SystemExit(classname + ": Unexisting input file")
    file_extension = PurePath(path).suffix
    if file_extension[1:] not in formats:
        fu.log(classname + ": Format %s in input file is not compatible" % file_extension[1:], out_log)
        raise SystemExit(classname + ": Format %s in input file is not compatible" % file_extension[1:])
    return path


def check_output_path(path, out_log, classname, formats=("json",)):
    """Checks output file path"""
    if PurePath(path).parent and not Path(PurePath(path).parent).exists():
        fu.log(classname + ": Unexisting output folder, exiting", out_log)
        raise SystemExit(classname + ": Unexisting output folder")
    file_extension = PurePath(path).suffix
    if file_extension[1:] not in formats:
        fu.log(classname + ": Format %s in output file is not compatible" % file_extension[1:], out_log)
        raise SystemExit(classname + ": Format %s in output file is not compatible" % file_extension[1:])
    return path


def invalid(error, out_log, classname):
    """Logs a validation error and exits with status 1"""
    fu.log(classname + ": " + str(error), out_log)
    raise SystemExit(classname + ": " + str(error))


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def dumps(value: Any, indent: int = 2, level: int = 0) -> str:
    """JSON text with sorted keys and floats written with 17 significant digits (non-finite as null)."""
    value = _plain(value)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None or isinstance(value, bool):
        return {None: "null", True: "true", False: "false"}[value]
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value if math.isfinite(value) else "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = [
            pad + dumps(str(key)) + ": " + dumps(value[key], indent, level + 1)
            for key in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [pad + dumps(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError("cannot serialize %r" % (value,))


def write_text_atomic(path: str, text: str) -> None:
    """Writes through a temporary file in the target folder, then renames it."""
    folder = os.path.dirname(os.path.abspath(path))
    handle, tmp_path = tempfile.mkstemp(dir=folder, prefix=".tmp_", suffix=PurePath(path).suffix)
    try:
        with os.fdopen(handle, "w") as tmp_file:
            tmp_file.write(text)
            tmp_file.flush()
            os.fsync(tmp_file.fileno())
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_json_atomic(path: str, data: Mapping) -> None:
    write_text_atomic(path, dumps(data) + "\n")


def get_family(family: str) -> str:
    if family not in FAMILIES:
        raise InvalidInputError("family: must be one of %s" % ", ".join(FAMILIES))
    return family


def get_exponents(spec: Optional[Mapping], family: str = "convex-concave"):
    exponents = parse_exponents(spec if spec is not None else DEFAULT_EXPONENTS[family])
    found = "two-parameter" if hasattr(exponents, "alpha") else "convex-concave"
    if found != family:
        raise InvalidInputError("exponents: ordering does not match family %s" % family)
    return exponents


def get_domain(spec: Optional[Mapping], grid_refine=1) -> Domain:
    domain = Domain.from_dict(spec if spec is not None else DEFAULT_DOMAIN)
    if isinstance(grid_refine, bool) or not isinstance(grid_refine, int) or grid_refine < 1:
        raise InvalidInputError("grid_refine: must be a positive integer")
    return domain.refined(grid_refine)


def _numbers(prefix: str, **values) -> dict:
    converted = {}
    for name, (kind, value) in values.items():
        try:
            converted[name] = kind(value)
        except (TypeError, ValueError):
            raise InvalidInputError("%s%s: must be a number" % (prefix, name)) from None
    return converted


def get_descent_options(starts, max_iter, tol_grad, seed, base: Optional[DescentOptions] = None) -> DescentOptions:
    base = base or DescentOptions()
    values = _numbers(
        "",
        starts=(int, base.starts if starts is None else starts),
        max_iter=(int, base.max_iter if max_iter is None else max_iter),
        tol_grad=(float, base.tol_grad if tol_grad is None else tol_grad),
        seed=(int, seed),
    )
    return replace(base, **values)


def get_fiber_options(t_min, t_max, brackets, tol_root) -> FiberOptions:
    return FiberOptions(
        **_numbers("", t_min=(float, t_min), t_max=(float, t_max), brackets=(int, brackets), tol_root=(float, tol_root))
    )


def get_coefficients(spec: Optional[Mapping], exponents) -> FiberCoefficients:
    spec = spec or {}
    if not isinstance(spec, Mapping):
        raise InvalidInputError("coefficients: expected a mapping")
    names = ("a", "b_q", "c", "b_alpha") if hasattr(exponents, "alpha") else ("a", "b_q", "c")
    values = _numbers("coefficients.", **{name: (float, spec.get(name, 1.0)) for name in names})
    return FiberCoefficients(exponents=exponents, **values)


def get_number(value, field: str, required: bool = True) -> Optional[float]:
    if value is None:
        if required:
            raise InvalidInputError("%s: required" % field)
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidInputError("%s: must be a number" % field) from None


def get_grid(spec, field: str = "grid") -> List[float]:
    """A list of values, or a mapping ``{start, stop, num}`` expanded with numpy.linspace."""
    if isinstance(spec, Mapping):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"])).tolist()
        except KeyError as missing:
            raise InvalidInputError("%s.%s: missing" % (field, missing.args[0])) from None
    try:
        return [float(v) for v in spec or []]
    except (TypeError, ValueError):
        raise InvalidInputError("%s: must be a list of numbers" % field) from None


def failure(error, out_log, classname) -> dict:
    """Logs a numerical failure; the returned record goes into the output JSON"""
    fu.log(classname + ": numerical failure: %s" % error, out_log)
    return {"error": type(error).__name__, "message": str(error)}
