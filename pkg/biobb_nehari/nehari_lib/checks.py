"""Property suites run by the ``check`` task: worked examples, closed form against scans,
homogeneity, orderings, critical-point census and gradient checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.optimize import root_scalar

from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib import zeromass as zm
from biobb_nehari.nehari_lib.errors import InvalidInputError, NehariError
from biobb_nehari.nehari_lib.extremal import (
    DescentOptions,
    gradient_check,
    minimize_quotient,
    monomial_quotient,
    rayleigh_quotient,
)
from biobb_nehari.nehari_lib.fibering import (
    Exponents3,
    Exponents4,
    FiberCoefficients,
    critical_points_3term,
    phi_fiber,
    sign_changes,
)

SCAN_POINTS = 10_000
SCALINGS = (0.5, 2.0, 10.0)
TOL_SCAN = 1e-8
TOL_CLOSED = 1e-10
TOL_FIBER = 1e-8
TOL_EXAMPLE = 1e-3
TOL_GRADIENT = 1e-5

WORKED_3 = Exponents3(1.5, 2.0, 3.0)
WORKED_4 = Exponents4(1.2, 1.5, 2.0, 3.0)


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: int = 0
    worst: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.violations == 0

    def record(self, ok: bool, measure: float = 0.0, label: str = "") -> None:
        self.checked += 1
        if math.isfinite(measure):
            self.worst = max(self.worst, abs(measure))
        if not ok:
            self.violations += 1
            if label and len(self.failures) < 10:
                self.failures.append(label)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "violations": self.violations,
            "worst": self.worst,
            "failures": list(self.failures),
        }


def relative(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


def random_coefficients(exponents, rng: np.random.Generator) -> FiberCoefficients:
    a, b_q, c, b_alpha = 10.0 ** rng.uniform(-1.0, 1.0, 4)
    return FiberCoefficients(a, b_q, c, exponents, b_alpha if isinstance(exponents, Exponents4) else None)


def scan_extremum(func: Callable[[float], float], t_star: float, maximize: bool = True,
                  points: int = SCAN_POINTS, step: float = 1e-5) -> float:
    """Arg-extremum of ``func`` from a dense geometric scan around ``t_star``, refined in the winning cell."""
    grid = np.geomspace(t_star * 1e-2, t_star * 1e2, points)
    values = np.array([func(float(t)) for t in grid])
    k = int(np.argmax(values) if maximize else np.argmin(values))
    k = min(max(k, 1), points - 2)
    lo, hi = float(grid[k - 1]), float(grid[k + 1])

    def slope(t):
        return (func(t * (1 + step)) - func(t * (1 - step))) / (2 * step * t)

    try:
        return float(root_scalar(slope, bracket=(lo, hi), method="brentq", xtol=lo * 1e-15, rtol=1e-14).root)
    except ValueError:
        return float(grid[k])


def _rn_lambda_slope(coeffs: FiberCoefficients, lam: float, t: np.ndarray) -> np.ndarray:
    ex = coeffs.exponents
    al = ex.alpha
    return (
        (ex.p - al) * coeffs.a * t ** (ex.p - al - 1)
        + lam * (ex.q - al) * coeffs.b_q * t ** (ex.q - al - 1)
        - (ex.gamma - al) * coeffs.c * t ** (ex.gamma - al - 1)
    ) / coeffs.b_alpha


def _sample_function(domain: gf.Domain, seed: int, index: int) -> gf.DiscreteFunction:
    return gf.random_positive(domain, np.random.default_rng([seed, index]))


# worked examples

def worked_examples(family: str) -> SuiteResult:
    suite = SuiteResult("worked_examples")
    if family == "convex-concave":
        unit = FiberCoefficients(1.0, 1.0, 1.0, WORKED_3)
        expected = {
            "s_max": (nq.s_max(unit), 1.0 / 3.0),
            "lambda": (nq.lambda_u(unit).value, 2.0 / (3.0 * math.sqrt(3.0))),
            "s_e_max": (nq.s_e_max(unit), 0.5),
            "lambda_e": (nq.lambda_e_u(unit).value, 1.0 / (2.0 * math.sqrt(2.0))),
        }
    elif family == "two-parameter":
        unit = FiberCoefficients(1.0, 1.0, 1.0, WORKED_4, 1.0)
        mu_plus, mu_minus = nq.mu_pm_quotients(unit, 0.1, "n")
        expected = {
            "C_n": (nq.C_n(WORKED_4), 4.0 / 27.0),
            "C_e": (nq.C_e(WORKED_4), 2.0 / 9.0),
            "lambda_n": (nq.lambda_n_quotient(unit).value, 0.20096),
            "lambda_e4": (nq.lambda_e_quotient(unit).value, 0.16678),
            "mu_n_plus": (mu_plus.value, 0.4539),
            "mu_n_minus": (mu_minus.value, 0.5275),
        }
    else:
        params = zm.ZeroMassParams(3, 4.0, 3.0, 1.0)
        expected = {
            "c_N_E": (zm.c_N_E(3, 1.0), 1.0 / 27.0),
            "c_pqNE": (zm.c_pqNE(params), 1.0 / 9.0),
            "c_pqN": (zm.c_pqN(params), 0.96150),
        }
    for name, (value, reference) in expected.items():
        error = relative(value, reference)
        suite.record(error < TOL_EXAMPLE, error, name)
    return suite


# closed form against scans

def closed_form_vs_scan(family: str, exponents, samples: int, seed: int) -> SuiteResult:
    suite = SuiteResult("closed_form_vs_scan")
    if family == "zero-mass":
        return _zero_mass_scan(exponents, samples, seed, suite)
    for i in range(samples):
        coeffs = random_coefficients(exponents, np.random.default_rng([seed, i]))
        if family == "convex-concave":
            pairs = {
                "s_max": (nq.s_max(coeffs), lambda t: nq.rn_3term(coeffs, t)),
                "s_e_max": (nq.s_e_max(coeffs), lambda t: nq.re_3term(coeffs, t)),
            }
        else:
            pairs = {
                "t_n": (nq.t_n(coeffs), lambda t: nq.Lambda_n(coeffs, t)),
                "t_e": (nq.t_e(coeffs), lambda t: nq.Lambda_e(coeffs, t)),
            }
        for name, (closed, func) in pairs.items():
            error = relative(scan_extremum(func, closed), closed)
            suite.record(error < TOL_SCAN, error, "%s sample %d" % (name, i))
    return suite


def _zero_mass_scan(params: zm.ZeroMassParams, samples: int, seed: int, suite: SuiteResult) -> SuiteResult:
    domain = gf.Domain.radial(params.R, 200, params.N)
    for i in range(samples):
        T, A, B = zm.integrals(_sample_function(domain, seed, i), params)
        closed = zm.t_E(T, B, params)

        def level(t):
            return zm.M_E(t * t * T, t**params.p * A, t**params.q * B, params)

        error = relative(scan_extremum(level, closed, maximize=False), closed)
        suite.record(error < TOL_SCAN, error, "t_E sample %d" % i)
    return suite


# homogeneity

def _closed_quotients(family: str, coeffs: FiberCoefficients) -> Dict[str, float]:
    if family == "convex-concave":
        return {"lambda": nq.lambda_u(coeffs).value, "lambda_e": nq.lambda_e_u(coeffs).value}
    return {"lambda_n": nq.lambda_n_quotient(coeffs).value, "lambda_e4": nq.lambda_e_quotient(coeffs).value}


def _fiber_quotients(coeffs: FiberCoefficients, lam: float) -> Dict[str, float]:
    values = {}
    for flavor in ("n", "e"):
        for value in nq.mu_pm_quotients(coeffs, lam, flavor):
            values[value.name] = value.value
    return values


def homogeneity(family: str, exponents, samples: int, seed: int) -> SuiteResult:
    suite = SuiteResult("homogeneity")
    if family == "zero-mass":
        return _zero_mass_homogeneity(exponents, samples, seed, suite)
    domain = gf.Domain.interval(1.0, 41)
    for i in range(samples):
        u = _sample_function(domain, seed, i)
        base = FiberCoefficients.from_function(u, exponents)
        closed = _closed_quotients(family, base)
        lam = 0.5 * closed["lambda_e4"] if family == "two-parameter" else None
        fiber = _fiber_quotients(base, lam) if lam is not None else {}
        for t in SCALINGS:
            scaled = FiberCoefficients.from_function(u.scaled(t), exponents)
            for name, value in _closed_quotients(family, scaled).items():
                drift = relative(value, closed[name])
                suite.record(drift < TOL_CLOSED, drift, "%s t=%g sample %d" % (name, t, i))
            if lam is not None:
                for name, value in _fiber_quotients(scaled, lam).items():
                    drift = relative(value, fiber[name])
                    suite.record(drift < TOL_FIBER, drift, "%s t=%g sample %d" % (name, t, i))
    return suite


def _zero_mass_homogeneity(params: zm.ZeroMassParams, samples: int, seed: int, suite: SuiteResult) -> SuiteResult:
    domain = gf.Domain.radial(params.R, 200, params.N)

    def values(v):
        T, A, B = zm.integrals(v, params)
        return {"mu_E": zm.mu_E(T, A, B, params).value, "mu_gn": zm.mu_gn(T, A, B, params)}

    for i in range(samples):
        u = _sample_function(domain, seed, i)
        base = values(u)
        for factor in SCALINGS:
            for kind, moved in (("t", u.scaled(factor)), ("sigma", gf.rescale(u, factor))):
                for name, value in values(moved).items():
                    drift = relative(value, base[name])
                    tol = TOL_CLOSED if name == "mu_gn" else TOL_FIBER
                    suite.record(drift < tol, drift, "%s %s=%g sample %d" % (name, kind, factor, i))
    return suite


# orderings

def ordering(family: str, exponents, samples: int, seed: int) -> SuiteResult:
    suite = SuiteResult("ordering")
    for i in range(samples):
        coeffs = random_coefficients(exponents, np.random.default_rng([seed, i]))
        if family == "convex-concave":
            suite.record(nq.lambda_e_u(coeffs).value < nq.lambda_u(coeffs).value, 0.0, "lambda_e < lambda sample %d" % i)
            continue
        lam_n = nq.lambda_n_quotient(coeffs).value
        lam_e = nq.lambda_e_quotient(coeffs).value
        suite.record(lam_e < lam_n, 0.0, "lambda_e4 < lambda_n sample %d" % i)
        lam = 0.5 * lam_e
        n_plus, n_minus = nq.mu_pm_quotients(coeffs, lam, "n")
        e_plus, e_minus = nq.mu_pm_quotients(coeffs, lam, "e")
        values = [n_plus.value, e_plus.value, e_minus.value, n_minus.value]
        suite.record(all(x < y for x, y in zip(values, values[1:])), 0.0, "mu chain sample %d" % i)
        scales = [n_plus.t, e_plus.t, nq.t_e(coeffs), n_minus.t, e_minus.t]
        suite.record(all(x < y for x, y in zip(scales, scales[1:])), 0.0, "t interlacing sample %d" % i)
    return suite


# critical-point census

def census(family: str, exponents, samples: int, seed: int) -> SuiteResult:
    suite = SuiteResult("census")
    for i in range(samples):
        coeffs = random_coefficients(exponents, np.random.default_rng([seed, i]))
        if family == "convex-concave":
            lam_u = nq.lambda_u(coeffs).value
            grid = np.geomspace(nq.s_max(coeffs) * 1e-5, nq.s_max(coeffs) * 1e4, SCAN_POINTS)
            for factor, expected in ((0.5, 2), (1.5, 0)):
                lam = factor * lam_u
                points = critical_points_3term(coeffs, lam)
                brute = sign_changes(lambda t: phi_fiber(coeffs, lam, None, t).dphi, grid)
                ok = len(points) == expected == brute and (expected == 0 or points.signs == [1, -1])
                suite.record(ok, 0.0, "lambda=%g*lambda(u) sample %d" % (factor, i))
            points = critical_points_3term(coeffs, lam_u)
            suite.record(len(points) == 1 and points.degenerate, 0.0, "lambda=lambda(u) sample %d" % i)
        else:
            lam = 0.5 * nq.lambda_n_quotient(coeffs).value
            t_star = nq.t_n(coeffs)
            grid = np.geomspace(t_star * 1e-5, t_star * 1e4, SCAN_POINTS)
            count = sign_changes(lambda t: _rn_lambda_slope(coeffs, lam, t), grid)
            suite.record(count == 2, float(count), "R^n_lambda critical points sample %d" % i)
    return suite


# gradients and eigenvalue sanity

def gradients(family: str, exponents, seed: int, samples: int = 10) -> SuiteResult:
    suite = SuiteResult("gradients")
    if family == "zero-mass":
        domain = gf.Domain.radial(exponents.R, 60, exponents.N)
        quotient = zm.gn_quotient(exponents)
    else:
        domain = gf.Domain.interval(1.0, 31)
        name = "lambda" if family == "convex-concave" else "lambda_n"
        quotient = monomial_quotient(nq.monomial(name, exponents))
    for i in range(samples):
        error = gradient_check(quotient, _sample_function(domain, seed, i))
        suite.record(error < TOL_GRADIENT, error, "sample %d" % i)
    return suite


def rayleigh_sanity(nodes: int = 200, seed: int = 0) -> SuiteResult:
    suite = SuiteResult("rayleigh_eigenvalue")
    estimate = minimize_quotient(rayleigh_quotient(), gf.Domain.interval(1.0, nodes), DescentOptions(starts=1, seed=seed), "rayleigh")
    error = relative(estimate.value, math.pi**2)
    suite.record(error < 1e-2, error, "pi^2")
    return suite


def nonexistence(params: Optional[zm.ZeroMassParams] = None, seed: int = 0) -> SuiteResult:
    suite = SuiteResult("nonexistence")
    params = params or zm.ZeroMassParams(3, 3.0, 4.0, 1.0)
    certificate = zm.nonexistence_certificate(params, seed=seed)
    suite.record(certificate.issued, float(certificate.sign_changes), "certificate (p, q)=(%g, %g)" % (params.p, params.q))
    return suite


def positivity(params: zm.ZeroMassParams, samples: int, seed: int) -> SuiteResult:
    suite = SuiteResult("gn_positivity")
    domain = gf.Domain.radial(params.R, 200, params.N)
    for i in range(samples):
        T, A, B = zm.integrals(_sample_function(domain, seed, i), params)
        value = zm.mu_gn(T, A, B, params)
        suite.record(value > 0, value, "sample %d" % i)
    return suite


def run_suites(family: str, exponents=None, samples: int = 100, seed: int = 0) -> List[SuiteResult]:
    """Every suite of ``family``; a suite raising a library error is recorded as failed."""
    if family == "convex-concave":
        exponents = exponents or WORKED_3
        runners = [
            ("worked_examples", lambda: worked_examples(family)),
            ("closed_form_vs_scan", lambda: closed_form_vs_scan(family, exponents, samples, seed)),
            ("homogeneity", lambda: homogeneity(family, exponents, max(1, samples // 10), seed)),
            ("ordering", lambda: ordering(family, exponents, samples, seed)),
            ("census", lambda: census(family, exponents, samples, seed)),
            ("gradients", lambda: gradients(family, exponents, seed)),
            ("rayleigh_eigenvalue", lambda: rayleigh_sanity(seed=seed)),
        ]
    elif family == "two-parameter":
        exponents = exponents or WORKED_4
        runners = [
            ("worked_examples", lambda: worked_examples(family)),
            ("closed_form_vs_scan", lambda: closed_form_vs_scan(family, exponents, samples, seed)),
            ("homogeneity", lambda: homogeneity(family, exponents, max(1, samples // 10), seed)),
            ("ordering", lambda: ordering(family, exponents, samples, seed)),
            ("census", lambda: census(family, exponents, samples, seed)),
            ("gradients", lambda: gradients(family, exponents, seed)),
        ]
    elif family == "zero-mass":
        params = exponents or zm.ZeroMassParams(3, 4.0, 3.0, 1.0)
        runners = [
            ("worked_examples", lambda: worked_examples(family)),
            ("closed_form_vs_scan", lambda: closed_form_vs_scan(family, params, max(1, samples // 5), seed)),
            ("homogeneity", lambda: homogeneity(family, params, max(1, samples // 10), seed)),
            ("gn_positivity", lambda: positivity(params, max(1, samples // 5), seed)),
            ("gradients", lambda: gradients(family, params, seed, 5)),
            ("nonexistence", lambda: nonexistence(seed=seed)),
        ]
    else:
        raise InvalidInputError("family: unknown family %r" % (family,))
    results = []
    for name, runner in runners:
        try:
            results.append(runner())
        except NehariError as error:
            failed = SuiteResult(name)
            failed.record(False, math.nan, "%s: %s" % (type(error).__name__, error))
            results.append(failed)
    return results
