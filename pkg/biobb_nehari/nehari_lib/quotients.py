"""Rayleigh quotients along the fiber and the nonlinear generalized Rayleigh quotients built on them.

All functions take :class:`FiberCoefficients`, so a quotient of ``u`` is a
function of a handful of integrals. Closed-form realizers are substituted
into the quotient itself; the printed constants are kept only for
:func:`printed_constants`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import root_scalar

from biobb_nehari.nehari_lib.errors import DegenerateError, InvalidInputError, NoRootsError
from biobb_nehari.nehari_lib.fibering import Exponents3, Exponents4, FiberCoefficients

QUOTIENT_KINDS = ("n-quotient", "e-quotient", "lambda-quotient", "mu-plus", "mu-minus")
DEGENERATE_BAND = 1e-9


@dataclass(frozen=True)
class QuotientValue:
    value: float
    t: float
    kind: str
    name: str = ""

    def __post_init__(self):
        if self.kind not in QUOTIENT_KINDS:
            raise InvalidInputError("kind: unknown quotient kind %r" % (self.kind,))
        if not math.isfinite(self.value) or not self.t > 0:
            raise InvalidInputError("%s: quotient value must be finite with t > 0" % self.name)

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "value": self.value, "realizer_t": self.t}


def _positive_t(t: float) -> float:
    if not t > 0:
        raise InvalidInputError("t: must be positive")
    return t


def _three(coeffs: FiberCoefficients) -> Exponents3:
    if coeffs.four_term:
        raise InvalidInputError("exponents: expected q < p < gamma")
    return coeffs.exponents


def _four(coeffs: FiberCoefficients) -> Exponents4:
    if not coeffs.four_term:
        raise InvalidInputError("exponents: expected q < alpha < p < gamma")
    return coeffs.exponents


# convex-concave family

def rn_3term(coeffs: FiberCoefficients, t: float) -> float:
    ex = _three(coeffs)
    t = _positive_t(t)
    return (coeffs.a * t**ex.p - coeffs.c * t**ex.gamma) / (coeffs.b_q * t**ex.q)


def s_max(coeffs: FiberCoefficients) -> float:
    ex = _three(coeffs)
    return ((ex.p - ex.q) * coeffs.a / ((ex.gamma - ex.q) * coeffs.c)) ** (1.0 / (ex.gamma - ex.p))


def c_pq(exponents: Exponents3) -> float:
    """Constant of the closed form of ``lambda(u)``."""
    q, p, g = exponents.q, exponents.p, exponents.gamma
    return (g - p) / (g - q) * ((p - q) / (g - q)) ** ((p - q) / (g - p))


def lambda_u(coeffs: FiberCoefficients) -> QuotientValue:
    ex = _three(coeffs)
    value = (
        c_pq(ex)
        * coeffs.a ** ((ex.gamma - ex.q) / (ex.gamma - ex.p))
        / (coeffs.b_q * coeffs.c ** ((ex.p - ex.q) / (ex.gamma - ex.p)))
    )
    return QuotientValue(value, s_max(coeffs), "lambda-quotient", "lambda")


def re_3term(coeffs: FiberCoefficients, t: float) -> float:
    ex = _three(coeffs)
    t = _positive_t(t)
    return (coeffs.a * t**ex.p / ex.p - coeffs.c * t**ex.gamma / ex.gamma) / (
        coeffs.b_q * t**ex.q / ex.q
    )


def s_e_max(coeffs: FiberCoefficients) -> float:
    ex = _three(coeffs)
    ratio = ex.gamma * (ex.p - ex.q) * coeffs.a / (ex.p * (ex.gamma - ex.q) * coeffs.c)
    return ratio ** (1.0 / (ex.gamma - ex.p))


def lambda_e_u(coeffs: FiberCoefficients) -> QuotientValue:
    t = s_e_max(coeffs)
    return QuotientValue(re_3term(coeffs, t), t, "e-quotient", "lambda_e")


# two-parameter family

def rn_lambda_4term(coeffs: FiberCoefficients, lam: float, t: float) -> float:
    ex = _four(coeffs)
    t = _positive_t(t)
    return (coeffs.a * t**ex.p + lam * coeffs.b_q * t**ex.q - coeffs.c * t**ex.gamma) / (
        coeffs.b_alpha * t**ex.alpha
    )


def re_lambda_4term(coeffs: FiberCoefficients, lam: float, t: float) -> float:
    """Level ``mu`` at which ``Phi_{lam,mu}(tu) = 0``."""
    ex = _four(coeffs)
    t = _positive_t(t)
    energy = (
        coeffs.a * t**ex.p / ex.p
        + lam * coeffs.b_q * t**ex.q / ex.q
        - coeffs.c * t**ex.gamma / ex.gamma
    )
    return ex.alpha * energy / (coeffs.b_alpha * t**ex.alpha)


def Lambda_n(coeffs: FiberCoefficients, t: float) -> float:
    ex = _four(coeffs)
    t = _positive_t(t)
    return ((ex.p - ex.alpha) * coeffs.a * t**ex.p - (ex.gamma - ex.alpha) * coeffs.c * t**ex.gamma) / (
        (ex.alpha - ex.q) * coeffs.b_q * t**ex.q
    )


def Lambda_e(coeffs: FiberCoefficients, t: float) -> float:
    ex = _four(coeffs)
    t = _positive_t(t)
    top = (ex.p - ex.alpha) * coeffs.a * t**ex.p / ex.p - (
        ex.gamma - ex.alpha
    ) * coeffs.c * t**ex.gamma / ex.gamma
    return ex.q * top / ((ex.alpha - ex.q) * coeffs.b_q * t**ex.q)


def C_n(exponents: Exponents4) -> float:
    q, al, p, g = exponents.q, exponents.alpha, exponents.p, exponents.gamma
    return (p - al) * (p - q) / ((g - al) * (g - q))


def C_e(exponents: Exponents4) -> float:
    return exponents.gamma / exponents.p * C_n(exponents)


def t_n(coeffs: FiberCoefficients) -> float:
    ex = _four(coeffs)
    return (C_n(ex) * coeffs.a / coeffs.c) ** (1.0 / (ex.gamma - ex.p))


def t_e(coeffs: FiberCoefficients) -> float:
    ex = _four(coeffs)
    return (C_e(ex) * coeffs.a / coeffs.c) ** (1.0 / (ex.gamma - ex.p))


def lambda_n_quotient(coeffs: FiberCoefficients) -> QuotientValue:
    t = t_n(coeffs)
    return QuotientValue(Lambda_n(coeffs, t), t, "n-quotient", "lambda_n")


def lambda_e_quotient(coeffs: FiberCoefficients) -> QuotientValue:
    t = t_e(coeffs)
    return QuotientValue(Lambda_e(coeffs, t), t, "e-quotient", "lambda_e4")


_FLAVORS = {
    "n": (Lambda_n, t_n, rn_lambda_4term),
    "e": (Lambda_e, t_e, re_lambda_4term),
}


def _crossing(func, level: float, start: float, factor: float, limit: float) -> Tuple[float, float]:
    """Bracket of ``func = level`` between ``start`` (above) and a geometric walk towards ``limit``."""
    other = start
    while (other > limit) if factor < 1 else (other < limit):
        other *= factor
        if func(other) < level:
            return (other, start) if factor < 1 else (start, other)
    raise NoRootsError("no crossing of level %g before t=%g" % (level, limit))


def mu_pm_quotients(
    coeffs: FiberCoefficients, lam: float, flavor: str = "n"
) -> Tuple[QuotientValue, QuotientValue]:
    """``(mu+, mu-)``: the quotient of the flavor at both roots of ``Lambda(tu) = lam``."""
    if flavor not in _FLAVORS:
        raise InvalidInputError("flavor: must be 'n' or 'e'")
    _four(coeffs)
    big_lambda, realizer, level_quotient = _FLAVORS[flavor]
    t_star = realizer(coeffs)
    peak = big_lambda(coeffs, t_star)
    if abs(lam - peak) <= DEGENERATE_BAND * abs(peak):
        raise DegenerateError("lambda=%g equals the %s-quotient maximum %g" % (lam, flavor, peak))
    if not 0 < lam < peak:
        raise NoRootsError("lambda=%g outside (0, %g) for flavor %s" % (lam, peak, flavor))

    def shifted(t):
        return big_lambda(coeffs, t) - lam

    roots = []
    for factor, limit in ((0.5, t_star * 1e-30), (2.0, t_star * 1e30)):
        lo, hi = _crossing(lambda t: big_lambda(coeffs, t), lam, t_star, factor, limit)
        sol = root_scalar(shifted, bracket=(lo, hi), method="brentq", xtol=lo * 1e-15, rtol=1e-15)
        roots.append(float(sol.root))
    t_plus, t_minus = roots
    return (
        QuotientValue(level_quotient(coeffs, lam, t_plus), t_plus, "mu-plus", "mu_%s_plus" % flavor),
        QuotientValue(level_quotient(coeffs, lam, t_minus), t_minus, "mu-minus", "mu_%s_minus" % flavor),
    )


@dataclass(frozen=True)
class MonomialQuotient:
    """``K a^ea b_q^eb c^ec``: closed-form quotient as a monomial in the integrals."""

    name: str
    kind: str
    constant: float
    exponents: object
    powers: Tuple[float, float, float]

    def __call__(self, coeffs: FiberCoefficients) -> float:
        ea, eb, ec = self.powers
        return self.constant * coeffs.a**ea * coeffs.b_q**eb * coeffs.c**ec

    def log_partials(self) -> Tuple[float, float, float]:
        """``d log Q / d log (a, b_q, c)``."""
        return self.powers


_MONOMIAL_SOURCES = {
    "lambda": (Exponents3, lambda_u),
    "lambda_e": (Exponents3, lambda_e_u),
    "lambda_n": (Exponents4, lambda_n_quotient),
    "lambda_e4": (Exponents4, lambda_e_quotient),
}


def monomial(name: str, exponents) -> MonomialQuotient:
    """Monomial form of ``lambda``, ``lambda_e`` (convex-concave) or ``lambda_n``, ``lambda_e4`` (two-parameter)."""
    if name not in _MONOMIAL_SOURCES:
        raise InvalidInputError("quotient: unknown closed-form quotient %r" % (name,))
    family, source = _MONOMIAL_SOURCES[name]
    if not isinstance(exponents, family):
        raise InvalidInputError("exponents: %s needs %s" % (name, family.__name__))
    unit = FiberCoefficients(1.0, 1.0, 1.0, exponents, 1.0 if family is Exponents4 else None)
    q, p, g = exponents.q, exponents.p, exponents.gamma
    value = source(unit)
    powers = ((g - q) / (g - p), -1.0, -(p - q) / (g - p))
    return MonomialQuotient(name, value.kind, value.value, exponents, powers)


def printed_constants(exponents) -> dict:
    """Printed constants next to the ones obtained by substituting the realizer."""
    q, p, g = exponents.q, exponents.p, exponents.gamma
    if isinstance(exponents, Exponents3):
        printed = q * p ** ((p - q) / (g - p)) / p ** ((g - q) / (g - p))
        computed = monomial("lambda_e", exponents).constant / monomial("lambda", exponents).constant
        return {"name": "c_pq", "printed": printed, "computed": computed}
    al = exponents.alpha
    printed = (
        (p - al) ** ((g - q) / (g - p))
        * (p - q) ** ((p - q) / (g - q))
        * (g - p)
        / ((al - q) * (g - al) ** ((p - q) / (g - p)) * (g - q) ** ((g - q) / (g - p)))
    )
    corrected = (
        (p - al) ** ((g - q) / (g - p))
        * (p - q) ** ((p - q) / (g - p))
        * (g - p)
        / ((al - q) * (g - al) ** ((p - q) / (g - p)) * (g - q) ** ((g - q) / (g - p)))
    )
    return {
        "name": "c_n_q_gamma",
        "printed": printed,
        "corrected": corrected,
        "computed": monomial("lambda_n", exponents).constant,
    }


def closed_form_quotient(name: str, coeffs: FiberCoefficients) -> QuotientValue:
    """Closed-form quotient selected by name."""
    if name not in _MONOMIAL_SOURCES:
        raise InvalidInputError("quotient: unknown closed-form quotient %r" % (name,))
    return _MONOMIAL_SOURCES[name][1](coeffs)


def profile(coeffs: FiberCoefficients, name: str, t_grid, lam: Optional[float] = None) -> np.ndarray:
    """Rows ``t, value`` of a quotient along the fiber."""
    funcs = {
        "rn": lambda t: rn_3term(coeffs, t),
        "re": lambda t: re_3term(coeffs, t),
        "rn_lambda": lambda t: rn_lambda_4term(coeffs, lam, t),
        "re_lambda": lambda t: re_lambda_4term(coeffs, lam, t),
        "Lambda_n": lambda t: Lambda_n(coeffs, t),
        "Lambda_e": lambda t: Lambda_e(coeffs, t),
    }
    if name not in funcs:
        raise InvalidInputError("profile: unknown quotient profile %r" % (name,))
    if name in ("rn_lambda", "re_lambda") and lam is None:
        raise InvalidInputError("lambda: required by the %s profile" % name)
    t_grid = np.asarray(t_grid, dtype=float)
    return np.column_stack([t_grid, [funcs[name](float(t)) for t in t_grid]])
