"""Fibering maps t -> Phi(tu) reduced to one variable, and their critical points.

Along the ray through ``u`` every energy of the convex-concave and
two-parameter families is a finite sum ``sum_k w_k t^e_k / e_k`` whose weights
are integrals of ``u`` (:class:`FiberCoefficients`). Positive critical points
are the positive roots of a generalized polynomial; they are isolated exactly
by splitting ``(0, inf)`` at the turning points of the derivative (found
recursively, each level has one term less) and refining every sign change with
Brent's method.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import root_scalar

from biobb_nehari.nehari_lib.errors import DegenerateError, InvalidInputError

logger = logging.getLogger(__name__)


def critical_exponent(p: float, dimension: int) -> float:
    """Sobolev exponent ``p* = pN/(N - p)`` (infinite when ``p >= N``)."""
    if p >= dimension:
        return math.inf
    return p * dimension / (dimension - p)


def _ordered(names: Sequence[str], values: Sequence[float]) -> None:
    for name, value in zip(names, values):
        if not math.isfinite(value):
            raise InvalidInputError("exponents.%s: must be finite" % name)
    chain = [1.0] + list(values)
    for k in range(1, len(chain)):
        if not chain[k - 1] < chain[k]:
            raise InvalidInputError(
                "exponents.%s: ordering 1 < %s violated" % (names[k - 1], " < ".join(names))
            )


@dataclass(frozen=True)
class Exponents3:
    """Convex-concave exponents ``1 < q < p < gamma``."""

    q: float
    p: float
    gamma: float

    def __post_init__(self):
        _ordered(("q", "p", "gamma"), (self.q, self.p, self.gamma))

    @property
    def lebesgue(self) -> tuple:
        return (self.q, self.gamma)

    def check_dimension(self, dimension: int) -> None:
        if not self.gamma < critical_exponent(self.p, dimension):
            raise InvalidInputError(
                "exponents.gamma: must stay below the critical exponent %g"
                % critical_exponent(self.p, dimension)
            )

    def to_dict(self) -> dict:
        return {"q": self.q, "p": self.p, "gamma": self.gamma}


@dataclass(frozen=True)
class Exponents4:
    """Two-parameter exponents ``1 < q < alpha < p < gamma``."""

    q: float
    alpha: float
    p: float
    gamma: float

    def __post_init__(self):
        _ordered(("q", "alpha", "p", "gamma"), (self.q, self.alpha, self.p, self.gamma))

    @property
    def lebesgue(self) -> tuple:
        return (self.q, self.alpha, self.gamma)

    def check_dimension(self, dimension: int) -> None:
        if not self.gamma < critical_exponent(self.p, dimension):
            raise InvalidInputError(
                "exponents.gamma: must stay below the critical exponent %g"
                % critical_exponent(self.p, dimension)
            )

    def to_dict(self) -> dict:
        return {"q": self.q, "alpha": self.alpha, "p": self.p, "gamma": self.gamma}


Exponents = Union[Exponents3, Exponents4]


def parse_exponents(spec: Mapping) -> Exponents:
    """Exponents from a mapping; the presence of ``alpha`` selects the two-parameter ordering."""
    if not isinstance(spec, Mapping):
        raise InvalidInputError("exponents: expected a mapping, got %r" % (spec,))
    try:
        if spec.get("alpha") is not None:
            return Exponents4(
                float(spec["q"]), float(spec["alpha"]), float(spec["p"]), float(spec["gamma"])
            )
        return Exponents3(float(spec["q"]), float(spec["p"]), float(spec["gamma"]))
    except KeyError as missing:
        raise InvalidInputError("exponents.%s: missing" % missing.args[0]) from None
    except (TypeError, ValueError):
        raise InvalidInputError("exponents: entries must be numbers") from None


@dataclass(frozen=True)
class ProblemParams:
    """Family, exponents and parameters of a convex-concave or two-parameter problem."""

    family: str
    exponents: Exponents
    lam: float = 0.0
    mu: Optional[float] = None

    def __post_init__(self):
        if self.family == "convex-concave":
            if not isinstance(self.exponents, Exponents3):
                raise InvalidInputError("exponents: convex-concave needs q < p < gamma")
        elif self.family == "two-parameter":
            if not isinstance(self.exponents, Exponents4):
                raise InvalidInputError("exponents: two-parameter needs q < alpha < p < gamma")
            if self.mu is None or not math.isfinite(self.mu):
                raise InvalidInputError("mu: required by the two-parameter family")
        else:
            raise InvalidInputError("family: unknown problem family %r" % (self.family,))
        if not math.isfinite(self.lam):
            raise InvalidInputError("lambda: must be finite")

    @property
    def grad_exponent(self) -> float:
        return self.exponents.p

    def energy_terms(self):
        """``(P, [(c_k, r_k)])`` with energy ``(1/P) int|grad u|^P + sum_k c_k/r_k int|u|^r_k``."""
        ex = self.exponents
        if self.family == "convex-concave":
            return ex.p, [(-self.lam, ex.q), (-1.0, ex.gamma)]
        return ex.p, [(self.lam, ex.q), (-self.mu, ex.alpha), (-1.0, ex.gamma)]

    def with_lam(self, lam: float) -> "ProblemParams":
        return replace(self, lam=lam)

    def with_mu(self, mu: float) -> "ProblemParams":
        return replace(self, mu=mu)


@dataclass(frozen=True)
class FiberCoefficients:
    """Integrals of ``u`` that reduce its fibering map to a function of ``t``."""

    a: float
    b_q: float
    c: float
    exponents: Exponents
    b_alpha: Optional[float] = None

    def __post_init__(self):
        four = isinstance(self.exponents, Exponents4)
        if four and self.b_alpha is None:
            raise InvalidInputError("b_alpha: required with two-parameter exponents")
        if not four and self.b_alpha is not None:
            raise InvalidInputError("b_alpha: only used with two-parameter exponents")
        for name in ("a", "b_q", "c", "b_alpha"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise InvalidInputError("coefficients.%s: must be positive and finite" % name)

    @property
    def four_term(self) -> bool:
        return isinstance(self.exponents, Exponents4)

    @classmethod
    def from_bundle(cls, bundle, exponents: Exponents) -> "FiberCoefficients":
        return cls(
            bundle.grad_p,
            bundle[exponents.q],
            bundle[exponents.gamma],
            exponents,
            bundle[exponents.alpha] if isinstance(exponents, Exponents4) else None,
        )

    @classmethod
    def from_function(cls, u, exponents: Exponents) -> "FiberCoefficients":
        from biobb_nehari.nehari_lib.gridfield import integrate

        return cls.from_bundle(integrate(u, exponents.lebesgue, exponents.p), exponents)

    def scaled(self, t: float) -> "FiberCoefficients":
        """Coefficients of ``t u``."""
        ex = self.exponents
        return FiberCoefficients(
            self.a * t**ex.p,
            self.b_q * t**ex.q,
            self.c * t**ex.gamma,
            ex,
            None if self.b_alpha is None else self.b_alpha * t**ex.alpha,
        )


class FiberValue(NamedTuple):
    phi: float
    dphi: float
    ddphi: float


def fiber_terms(coeffs: FiberCoefficients, lam: float, mu: Optional[float] = None):
    """Weights ``w_k`` and exponents ``e_k`` of ``Phi(tu) = sum_k w_k t^e_k / e_k``."""
    if not math.isfinite(lam):
        raise InvalidInputError("lambda: must be finite")
    ex = coeffs.exponents
    if coeffs.four_term:
        if mu is None or not math.isfinite(mu):
            raise InvalidInputError("mu: required by the two-parameter fibering map")
        return (
            np.array([coeffs.a, lam * coeffs.b_q, -mu * coeffs.b_alpha, -coeffs.c]),
            np.array([ex.p, ex.q, ex.alpha, ex.gamma]),
        )
    if mu is not None:
        raise InvalidInputError("mu: not used by the convex-concave fibering map")
    return (
        np.array([coeffs.a, -lam * coeffs.b_q, -coeffs.c]),
        np.array([ex.p, ex.q, ex.gamma]),
    )


def phi_fiber(coeffs: FiberCoefficients, lam: float, mu: Optional[float], t) -> FiberValue:
    """``Phi(tu)`` and its first two ``t``-derivatives; ``t`` may be an array."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise InvalidInputError("t: must be positive")
    weights, powers = fiber_terms(coeffs, lam, mu)
    tt = t_arr[..., None]
    phi = np.sum(weights * tt**powers / powers, axis=-1)
    dphi = np.sum(weights * tt ** (powers - 1.0), axis=-1)
    ddphi = np.sum(weights * (powers - 1.0) * tt ** (powers - 2.0), axis=-1)
    if t_arr.ndim == 0:
        return FiberValue(float(phi), float(dphi), float(ddphi))
    return FiberValue(phi, dphi, ddphi)


def fiber_profile(coeffs: FiberCoefficients, lam: float, mu: Optional[float], t_grid) -> np.ndarray:
    """Rows ``t, phi, dphi, ddphi`` over ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    value = phi_fiber(coeffs, lam, mu, t_grid)
    return np.column_stack([t_grid, value.phi, value.dphi, value.ddphi])


def geometric_grid(t_min: float = 1e-4, t_max: float = 1e3, points: int = 10_000) -> np.ndarray:
    return np.geomspace(t_min, t_max, points)


def sign_changes(func: Callable, grid) -> int:
    """Number of strict sign changes of ``func`` sampled on ``grid`` (exact zeros skipped)."""
    signs = np.sign(np.asarray(func(np.asarray(grid, dtype=float)), dtype=float))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class FiberOptions:
    t_min: float = 1e-4
    t_max: float = 1e3
    brackets: int = 512
    tol_root: float = 1e-10
    degenerate_band: float = 1e-8
    expand_factor: float = 10.0
    t_floor: float = 1e-30
    t_ceiling: float = 1e30

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise InvalidInputError("t_min/t_max: need 0 < t_min < t_max")
        if self.brackets < 1:
            raise InvalidInputError("brackets: must be positive")
        if not (self.tol_root > 0 and self.degenerate_band > 0):
            raise InvalidInputError("tol_root: tolerances must be positive")


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    sign: int
    dphi: float
    ddphi: float


@dataclass(frozen=True)
class CriticalPointSet:
    points: Tuple[CriticalPoint, ...] = ()
    bracketing_intervals: Tuple[Tuple[float, float], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, index: int) -> CriticalPoint:
        return self.points[index]

    @property
    def ts(self) -> List[float]:
        return [point.t for point in self.points]

    @property
    def signs(self) -> List[int]:
        return [point.sign for point in self.points]

    @property
    def degenerate(self) -> bool:
        return any(point.sign == 0 for point in self.points)


class _GenPoly:
    """``h(t) = sum_k w_k t^d_k`` with ``d_0 = 0`` after shifting by the smallest power."""

    def __init__(self, weights: Sequence[float], powers: Sequence[float]):
        kept = sorted(((d, w) for w, d in zip(weights, powers) if w != 0))
        shift = kept[0][0] if kept else 0.0
        self.powers = np.array([d - shift for d, _ in kept])
        self.weights = np.array([w for _, w in kept])

    def __len__(self) -> int:
        return self.weights.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return np.sum(self.weights * t**self.powers, axis=-1)

    def scale(self, t: float) -> float:
        return float(np.sum(np.abs(self.weights) * t**self.powers))

    def derivative(self) -> "_GenPoly":
        return _GenPoly(self.weights[1:] * self.powers[1:], self.powers[1:] - 1.0)

    def sign_at_zero(self) -> float:
        return float(np.sign(self.weights[0]))

    def sign_at_infinity(self) -> float:
        return float(np.sign(self.weights[-1]))


def _outer_point(poly: _GenPoly, start: float, target: float, factor: float, limit: float):
    """Walk geometrically from ``start`` towards ``limit`` until ``poly`` has sign ``target``."""
    t = start
    while (t > limit) if factor < 1 else (t < limit):
        t *= factor
        if np.sign(poly(t)) == target:
            return t
    return None


def _positive_roots(poly: _GenPoly, options: FiberOptions, grid: np.ndarray, brackets: list):
    """Positive roots of ``poly``; degenerate (double) roots are returned with flag ``True``."""
    if len(poly) <= 1:
        return []
    turning = [t for t, _ in _positive_roots(poly.derivative(), options, grid, [])]
    roots = []
    breaks = []
    for z in turning:
        if abs(float(poly(z))) <= options.tol_root * poly.scale(z):
            roots.append((z, True))
        breaks.append(z)
    breaks = sorted(set(breaks) | set(grid.tolist()))
    values = [float(v) for v in poly(np.array(breaks))]
    degenerate_at = {z for z, _ in roots}
    # a sign change this close to a degenerate root is that root split by rounding
    merge = 10.0 * math.sqrt(options.tol_root)

    def refine(lo: float, hi: float) -> None:
        sol = root_scalar(
            lambda s: float(poly(s)), bracket=(lo, hi), method="brentq", xtol=lo * 1e-15, rtol=1e-15
        )
        root = float(sol.root)
        if any(abs(root - z) <= merge * z for z in degenerate_at):
            return
        brackets.append((lo, hi))
        roots.append((root, False))

    zero_sign = poly.sign_at_zero()
    first = breaks[0]
    if first not in degenerate_at and np.sign(values[0]) == -zero_sign:
        lo = _outer_point(poly, first, zero_sign, 1.0 / options.expand_factor, options.t_floor)
        if lo is None:
            logger.debug("root below t=%g left unresolved", options.t_floor)
        else:
            refine(lo, first)
    for k in range(len(breaks) - 1):
        lo, hi = breaks[k], breaks[k + 1]
        if values[k] == 0.0:
            if lo not in degenerate_at:
                roots.append((lo, False))
        elif np.sign(values[k]) * np.sign(values[k + 1]) < 0:
            refine(lo, hi)
    last = breaks[-1]
    inf_sign = poly.sign_at_infinity()
    if last not in degenerate_at:
        if values[-1] == 0.0:
            roots.append((last, False))
        elif np.sign(values[-1]) == -inf_sign:
            hi = _outer_point(poly, last, inf_sign, options.expand_factor, options.t_ceiling)
            if hi is None:
                logger.debug("root above t=%g left unresolved", options.t_ceiling)
            else:
                refine(last, hi)
    roots.sort()
    return roots


def _critical_points(coeffs, lam, mu, options, bound) -> CriticalPointSet:
    options = options or FiberOptions()
    weights, powers = fiber_terms(coeffs, lam, mu)
    poly = _GenPoly(weights, powers - 1.0)
    grid = np.geomspace(options.t_min, options.t_max, options.brackets + 1)
    brackets: list = []
    found = _positive_roots(poly, options, grid, brackets)
    points = []
    for t, degenerate in found:
        value = phi_fiber(coeffs, lam, mu, t)
        band = options.degenerate_band * float(
            np.sum(np.abs(weights * (powers - 1.0)) * t ** (powers - 2.0))
        )
        if degenerate or abs(value.ddphi) < band:
            sign = 0
        else:
            sign = 1 if value.ddphi > 0 else -1
        scale = float(np.sum(np.abs(weights) * t ** (powers - 1.0)))
        if abs(value.dphi) >= options.tol_root * scale:
            logger.debug("critical point t=%g: |dphi|/scale=%g", t, abs(value.dphi) / scale)
        if points and sign == 0 and points[-1].sign == 0 and abs(points[-1].t - t) <= options.tol_root * t:
            continue
        points.append(CriticalPoint(t, sign, value.dphi, value.ddphi))
    if len(points) > bound:
        raise DegenerateError(
            "fibering map returned %d critical points, at most %d possible" % (len(points), bound)
        )
    return CriticalPointSet(tuple(points), tuple(brackets))


def critical_points_3term(
    coeffs: FiberCoefficients, lam: float, options: Optional[FiberOptions] = None
) -> CriticalPointSet:
    """Positive critical points of the convex-concave fibering map, ``t+ < t-``."""
    if coeffs.four_term:
        raise InvalidInputError("exponents: critical_points_3term needs q < p < gamma")
    return _critical_points(coeffs, lam, None, options, 2)


def critical_points_4term(
    coeffs: FiberCoefficients, lam: float, mu: float, options: Optional[FiberOptions] = None
) -> CriticalPointSet:
    """Positive critical points ``s0 <= s1 <= s2`` of the two-parameter fibering map."""
    if not coeffs.four_term:
        raise InvalidInputError("exponents: critical_points_4term needs q < alpha < p < gamma")
    return _critical_points(coeffs, lam, mu, options, 3)


def critical_points(
    coeffs: FiberCoefficients,
    lam: float,
    mu: Optional[float] = None,
    options: Optional[FiberOptions] = None,
) -> CriticalPointSet:
    if coeffs.four_term:
        return critical_points_4term(coeffs, lam, mu, options)
    return critical_points_3term(coeffs, lam, options)
