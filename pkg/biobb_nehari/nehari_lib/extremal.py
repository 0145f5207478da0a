"""Extremal values of 0-homogeneous quotients by normalized multi-start descent.

A quotient is minimized over nonnegative nodal vectors. Each start runs a
projected, stiffness-preconditioned gradient descent with Armijo backtracking
and renormalizes the iterate after every accepted step. Starts are independent
and run on a thread pool capped by ``NEHARI_RQ_THREADS``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import (
    DegenerateError,
    InfeasibleError,
    InvalidInputError,
    InvalidQuotientError,
    NoRootsError,
    PreconditionError,
)
from biobb_nehari.nehari_lib.fibering import Exponents3, Exponents4, FiberCoefficients
from biobb_nehari.nehari_lib.quotients import MonomialQuotient, monomial, mu_pm_quotients

logger = logging.getLogger(__name__)

THREADS_VARIABLE = "NEHARI_RQ_THREADS"
HOMOGENEITY_DRIFT = 1e-6
TINY = 1e-300


def default_threads() -> int:
    """Worker threads for multi-start descent, read from ``NEHARI_RQ_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_VARIABLE, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("%s=%r is not an integer, using 1 thread", THREADS_VARIABLE, raw)
        return 1


@dataclass(frozen=True)
class DescentOptions:
    starts: int = 4
    max_iter: int = 2000
    tol_grad: float = 1e-7
    tol_stall: float = 1e-4
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    seed: int = 0
    precondition: bool = True
    threads: Optional[int] = None
    initial: Tuple = ()
    monitor: Optional[Callable] = None

    def __post_init__(self):
        if self.starts < 1:
            raise InvalidInputError("starts: at least one start is required")
        if self.max_iter < 0:
            raise InvalidInputError("max_iter: must be nonnegative")
        if not self.tol_grad > 0:
            raise InvalidInputError("tol_grad: must be positive")
        if not self.tol_stall > 0:
            raise InvalidInputError("tol_stall: must be positive")
        if not (0 < self.armijo < 1 and 0 < self.shrink < 1):
            raise InvalidInputError("armijo/shrink: must lie in (0, 1)")


class IntegralQuotient:
    """0-homogeneous functional ``reduce(IntegralBundle)`` with an exact nodal gradient.

    ``partials(bundle)`` returns ``(dQ/d grad_p, {r: dQ/d int|u|^r})``; without it
    the partials are central differences in the integrals themselves.
    """

    def __init__(
        self,
        reduce: Callable,
        grad_exponent: float,
        exponents: Sequence[float],
        partials: Optional[Callable] = None,
        name: str = "quotient",
        norm_exponent: Optional[float] = None,
    ):
        self.reduce = reduce
        self.grad_exponent = float(grad_exponent)
        self.exponents = tuple(float(r) for r in exponents)
        self.partials = partials
        self.name = name
        self.norm_exponent = norm_exponent if norm_exponent is not None else max(self.exponents)

    def __call__(self, u: gf.DiscreteFunction) -> float:
        return self.value(u)

    def bundle(self, u: gf.DiscreteFunction) -> gf.IntegralBundle:
        return gf.integrate(u, self.exponents, self.grad_exponent)

    def value(self, u: gf.DiscreteFunction) -> float:
        return float(self.reduce(self.bundle(u)))

    def _difference_partials(self, bundle: gf.IntegralBundle):
        def derivative(make):
            x = make(None)
            h = 1e-6 * abs(x) if x else 1e-12
            plus = self.reduce(make(x + h))
            minus = self.reduce(make(x - h))
            if math.isfinite(plus) and math.isfinite(minus):
                return (plus - minus) / (2 * h)
            centre = self.reduce(bundle)
            if math.isfinite(plus):
                return (plus - centre) / h
            if math.isfinite(minus):
                return (centre - minus) / h
            return 0.0

        def grad_maker(x):
            return bundle.grad_p if x is None else bundle.replace(grad_p=x)

        d_grad = derivative(grad_maker)
        d_leb = {}
        for r in self.exponents:
            def leb_maker(x, r=r):
                return bundle[r] if x is None else bundle.replace(**{str(r): x})

            d_leb[r] = derivative(leb_maker)
        return d_grad, d_leb

    def value_and_gradient(self, u: gf.DiscreteFunction):
        bundle = self.bundle(u)
        value = float(self.reduce(bundle))
        if not math.isfinite(value):
            return value, None
        d_grad, d_leb = (self.partials or self._difference_partials)(bundle)
        g_grad, g_leb = gf.integral_gradients(u, self.exponents, self.grad_exponent)
        gradient = d_grad * g_grad
        for r in self.exponents:
            gradient = gradient + d_leb[r] * g_leb[r]
        return value, gradient


class CallableQuotient:
    """Plain callable on DiscreteFunction, differentiated node by node."""

    norm_exponent = None

    def __init__(self, func: Callable, step: float = 1e-6, name: str = "quotient"):
        self.func = func
        self.step = step
        self.name = getattr(func, "__name__", name)

    def value(self, u: gf.DiscreteFunction) -> float:
        return float(self.func(u))

    def value_and_gradient(self, u: gf.DiscreteFunction):
        value = self.value(u)
        if not math.isfinite(value):
            return value, None
        return value, nodal_difference_gradient(self.func, u, self.step)


def nodal_difference_gradient(func: Callable, u: gf.DiscreteFunction, h: float) -> np.ndarray:
    step = h * max(u.sup_norm(), 1e-12)
    gradient = np.zeros_like(u.values)
    for i in range(u.values.size):
        shifted = u.values.copy()
        shifted[i] += step
        plus = float(func(u.with_values(shifted)))
        shifted[i] -= 2 * step
        minus = float(func(u.with_values(shifted)))
        gradient[i] = (plus - minus) / (2 * step)
    return gradient


def as_objective(quotient):
    if hasattr(quotient, "value_and_gradient"):
        return quotient
    if callable(quotient):
        return CallableQuotient(quotient)
    raise InvalidInputError("quotient: expected a callable or an IntegralQuotient")


def normalize(u: gf.DiscreteFunction, norm_exponent: Optional[float]) -> Tuple[gf.DiscreteFunction, float]:
    """Scale ``u`` to unit ``L^norm_exponent`` norm (unit sup-norm when no exponent); returns the divisor."""
    if norm_exponent is None:
        size = u.sup_norm()
    else:
        size = gf.integrate(u, [norm_exponent])[norm_exponent] ** (1.0 / norm_exponent)
    if not size > 0:
        raise InvalidInputError("u: cannot normalize the zero function")
    return u.scaled(1.0 / size), size


@dataclass
class StartResult:
    index: int
    value: float
    u: gf.DiscreteFunction
    iterations: int
    gradient_norm: float
    converged: bool
    history: List[float] = field(default_factory=list)
    stalled: bool = False


@dataclass
class ExtremalEstimate:
    value: float
    minimizer: gf.DiscreteFunction
    starts: int
    per_start_values: List[float]
    iterations: List[int]
    final_gradient: float
    converged: bool
    resolution: tuple
    name: str = "quotient"
    history: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "grid": self.minimizer.domain.to_dict(),
            "starts": self.starts,
            "per_start_values": list(self.per_start_values),
            "diagnostics": {
                "iterations": list(self.iterations),
                "final_gradient": self.final_gradient,
                "converged": self.converged,
            },
        }


def _gradient_measure(value: float, pg: np.ndarray, u: gf.DiscreteFunction, weights: np.ndarray) -> float:
    if pg.size == 0:
        return 0.0
    return float(np.max(np.abs(pg / weights))) * u.sup_norm() / max(abs(value), TINY)


def descend(objective, u0: gf.DiscreteFunction, options: DescentOptions, index: int = 0) -> StartResult:
    """One projected, preconditioned descent run from ``u0``."""
    norm_exponent = getattr(objective, "norm_exponent", None)
    u, _ = normalize(u0.with_values(np.maximum(u0.values, 0.0)), norm_exponent)
    weights = gf.nodal_weights(u.domain)
    factor = gf.stiffness_factor(u.domain) if options.precondition else None
    value, grad = objective.value_and_gradient(u)
    history = [value]
    if grad is None:
        return StartResult(index, math.inf, u, 0, math.inf, False, history)
    step = None
    measure = math.inf
    iterations = 0
    converged = False
    stalled = False
    for iterations in range(1, options.max_iter + 1):
        pg = np.where((u.values <= 0) & (grad > 0), 0.0, grad)
        measure = _gradient_measure(value, pg, u, weights)
        if measure < options.tol_grad:
            converged = True
            iterations -= 1
            break
        direction = -factor.solve(pg) if factor is not None else -pg / weights
        if grad @ direction >= 0:
            direction = -pg / weights
        if step is None:
            step = 0.1 * u.sup_norm() / max(float(np.max(np.abs(direction))), TINY)
        accepted = None
        for _ in range(options.max_backtracks):
            candidate = np.maximum(u.values + step * direction, 0.0)
            if np.any(candidate > 0):
                trial = objective.value(u.with_values(candidate))
                decrease = options.armijo * float(grad @ (candidate - u.values))
                if math.isfinite(trial) and trial <= value and trial <= value + decrease:
                    accepted = candidate
                    break
            step *= options.shrink
        if accepted is None:
            # no representable decrease left: accept a small relative gradient
            stalled = True
            converged = measure < max(options.tol_stall, options.tol_grad)
            logger.debug(
                "start %d: line search stalled at iteration %d (gradient %.3g)", index, iterations, measure
            )
            break
        u, size = normalize(u.with_values(accepted), norm_exponent)
        value, grad = objective.value_and_gradient(u)
        if grad is None:
            break
        step = 2.0 * step / size
        history.append(value)
        if options.monitor is not None:
            options.monitor(u, value)
    else:
        pg = np.where((u.values <= 0) & (grad > 0), 0.0, grad)
        measure = _gradient_measure(value, pg, u, weights)
        converged = measure < options.tol_grad
    return StartResult(index, value, u, iterations, measure, converged, history, stalled)


def start_functions(domain: gf.Domain, options: DescentOptions) -> List[gf.DiscreteFunction]:
    """Warm starts, then the eigen shape, hats at random centers and seeded positive fields."""
    starts = [u for u in options.initial if u is not None]
    index = 0
    while len(starts) < options.starts:
        rng = np.random.default_rng([options.seed, index])
        kind = index % 3
        if kind == 0 and index == 0:
            starts.append(gf.eigen_shape(domain))
        elif kind == 1:
            if domain.kind == "radial":
                width = domain.extent[0] * rng.uniform(0.3, 1.0)
                starts.append(gf.hat(domain, width=width))
            else:
                center = [e * rng.uniform(0.25, 0.75) for e in domain.extent]
                starts.append(gf.hat(domain, center=center))
        else:
            starts.append(gf.random_positive(domain, rng))
        index += 1
    return starts[: max(options.starts, len(options.initial))]


def check_homogeneity(objective, u: gf.DiscreteFunction) -> None:
    first = objective.value(u)
    second = objective.value(u.scaled(2.0))
    if not (math.isfinite(first) and math.isfinite(second)):
        return
    if abs(second - first) > HOMOGENEITY_DRIFT * max(abs(first), TINY):
        raise InvalidQuotientError(
            "quotient is not 0-homogeneous: Q(u)=%.17g, Q(2u)=%.17g" % (first, second)
        )


def minimize_quotient(
    quotient, domain: gf.Domain, options: Optional[DescentOptions] = None, name: Optional[str] = None
) -> ExtremalEstimate:
    """Infimum estimate of a 0-homogeneous quotient over nonnegative functions on ``domain``."""
    options = options or DescentOptions()
    objective = as_objective(quotient)
    starts = start_functions(domain, options)
    check_homogeneity(objective, starts[0])
    threads = options.threads or default_threads()
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda item: descend(objective, item[1], options, item[0]), enumerate(starts)))
    else:
        results = [descend(objective, u0, options, i) for i, u0 in enumerate(starts)]
    feasible = [r for r in results if math.isfinite(r.value)]
    if not feasible:
        raise InfeasibleError("%s: no start reached a finite value" % (name or objective.name))
    best = min(feasible, key=lambda r: (r.value, r.index))
    if not best.converged:
        logger.info(
            "%s: best start %d did not converge (gradient %.3g)",
            name or objective.name, best.index, best.gradient_norm,
        )
    return ExtremalEstimate(
        value=best.value,
        minimizer=best.u,
        starts=len(results),
        per_start_values=[r.value for r in results],
        iterations=[r.iterations for r in results],
        final_gradient=best.gradient_norm,
        converged=best.converged,
        resolution=domain.resolution,
        name=name or objective.name,
        history=best.history,
    )


def rayleigh_quotient() -> IntegralQuotient:
    """Classical quotient ``int|grad u|^2 / int u^2``."""

    def reduce(bundle):
        return bundle.grad_p / bundle[2.0] if bundle[2.0] > 0 else math.inf

    def partials(bundle):
        b = bundle[2.0]
        return 1.0 / b, {2.0: -bundle.grad_p / b**2}

    return IntegralQuotient(reduce, 2.0, (2.0,), partials, name="rayleigh", norm_exponent=2.0)


def monomial_quotient(mono: MonomialQuotient) -> IntegralQuotient:
    """Closed-form quotient as an IntegralQuotient with analytic partials."""
    ex = mono.exponents
    q, g = float(ex.q), float(ex.gamma)
    ea, eb, ec = mono.powers

    def reduce(bundle):
        a, b, c = bundle.grad_p, bundle[q], bundle[g]
        if not (a > 0 and b > 0 and c > 0):
            return math.inf
        return mono.constant * a**ea * b**eb * c**ec

    def partials(bundle):
        value = reduce(bundle)
        return value * ea / bundle.grad_p, {q: value * eb / bundle[q], g: value * ec / bundle[g]}

    return IntegralQuotient(reduce, ex.p, (q, g), partials, name=mono.name, norm_exponent=g)


def _coefficients(bundle: gf.IntegralBundle, exponents) -> Optional[FiberCoefficients]:
    if bundle.grad_p <= 0 or any(bundle[r] <= 0 for r in exponents.lebesgue):
        return None
    return FiberCoefficients.from_bundle(bundle, exponents)


def mu_quotient(exponents: Exponents4, lam: float, sign: str, flavor: str) -> IntegralQuotient:
    """Pointwise ``mu^{flavor,sign}_lam(u)``; infinite where the pair does not exist."""
    if sign not in ("+", "-"):
        raise InvalidInputError("sign: must be '+' or '-'")
    pick = 0 if sign == "+" else 1

    def reduce(bundle):
        coeffs = _coefficients(bundle, exponents)
        if coeffs is None:
            return math.inf
        try:
            return mu_pm_quotients(coeffs, lam, flavor)[pick].value
        except (NoRootsError, DegenerateError):
            return math.inf

    name = "mu_%s_%s" % (flavor, "plus" if sign == "+" else "minus")
    return IntegralQuotient(reduce, exponents.p, exponents.lebesgue, name=name, norm_exponent=exponents.gamma)


def _checked(domain: gf.Domain, exponents) -> None:
    exponents.check_dimension(domain.dimension)


def lambda_star(domain: gf.Domain, exponents: Exponents3, options: Optional[DescentOptions] = None) -> ExtremalEstimate:
    if not isinstance(exponents, Exponents3):
        raise InvalidInputError("exponents: lambda_star needs q < p < gamma")
    _checked(domain, exponents)
    return minimize_quotient(monomial_quotient(monomial("lambda", exponents)), domain, options, "lambda_star")


def lambda_n_star(domain: gf.Domain, exponents: Exponents4, options: Optional[DescentOptions] = None) -> ExtremalEstimate:
    if not isinstance(exponents, Exponents4):
        raise InvalidInputError("exponents: lambda_n_star needs q < alpha < p < gamma")
    _checked(domain, exponents)
    return minimize_quotient(monomial_quotient(monomial("lambda_n", exponents)), domain, options, "lambda_n_star")


def lambda_e_star(domain: gf.Domain, exponents: Exponents4, options: Optional[DescentOptions] = None) -> ExtremalEstimate:
    if not isinstance(exponents, Exponents4):
        raise InvalidInputError("exponents: lambda_e_star needs q < alpha < p < gamma")
    _checked(domain, exponents)
    return minimize_quotient(monomial_quotient(monomial("lambda_e4", exponents)), domain, options, "lambda_e_star")


def mu_extremal(
    domain: gf.Domain,
    exponents: Exponents4,
    lam: float,
    sign: str,
    flavor: str,
    options: Optional[DescentOptions] = None,
    bound: Optional[float] = None,
) -> ExtremalEstimate:
    """Infimum of ``mu^{flavor,sign}_lam(u)``; ``bound`` is the lambda-extremal value of the flavor."""
    if flavor not in ("n", "e"):
        raise InvalidInputError("flavor: must be 'n' or 'e'")
    if bound is None:
        star = lambda_n_star if flavor == "n" else lambda_e_star
        bound = star(domain, exponents, options).value
    if not 0 < lam < bound:
        raise PreconditionError(
            "lambda=%g outside (0, %g) required by the %s-flavor mu quotients" % (lam, bound, flavor)
        )
    quotient = mu_quotient(exponents, lam, sign, flavor)
    return minimize_quotient(quotient, domain, options, quotient.name)


def gradient_check(quotient, u: gf.DiscreteFunction, h: float = 1e-5) -> float:
    """Max discrepancy between the descent gradient and central differences, relative to the latter."""
    if u.is_zero():
        raise InvalidInputError("u: gradient check needs a nonzero function")
    if not h > 0:
        raise InvalidInputError("h: must be positive")
    objective = as_objective(quotient)
    _, gradient = objective.value_and_gradient(u)
    reference = nodal_difference_gradient(objective.value, u, h)
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    diff = float(np.max(np.abs(gradient - reference))) if reference.size else 0.0
    if scale == 0.0:
        return diff
    return diff / scale


def refinement_study(estimator: Callable, domain: gf.Domain, factors: Sequence[int] = (1, 2)) -> List[Dict]:
    """Rows ``{resolution, value, relative_change}`` of ``estimator`` on refined grids."""
    rows = []
    previous = None
    for factor in factors:
        fine = domain.refined(factor)
        value = estimator(fine).value
        change = None if previous is None else abs(value - previous) / max(abs(value), TINY)
        rows.append({"resolution": list(fine.resolution), "value": value, "relative_change": change})
        previous = value
    return rows


def audit(estimate: ExtremalEstimate, quotient, trials: int = 20, seed: int = 0) -> Dict:
    """Infimum-bound audit: the estimate against the quotient at seeded trial functions."""
    objective = as_objective(quotient)
    domain = estimate.minimizer.domain
    values = []
    for i in range(trials):
        rng = np.random.default_rng([seed, 1000 + i])
        if i % 2 and domain.kind != "radial":
            center = [e * rng.uniform(0.2, 0.8) for e in domain.extent]
            trial = gf.hat(domain, center=center)
        else:
            trial = gf.random_positive(domain, rng)
        values.append(objective.value(trial))
    slack = 1e-10 * max(abs(estimate.value), TINY)
    violations = sum(1 for v in values if math.isfinite(v) and estimate.value > v + slack)
    return {"estimate": estimate.value, "trial_values": values, "violations": violations}
