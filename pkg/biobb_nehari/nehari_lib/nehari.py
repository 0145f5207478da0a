"""Nehari-manifold minimizers through the fibering projection, branch continuation and verification.

A function ``u`` is projected on the Nehari manifold by scaling it to one of
the critical points of its fibering map; the reduced energy
``J(u) = Phi(t(u) u)`` is 0-homogeneous, so it is minimized with the same
normalized descent as the quotients. Its gradient is ``t grad Phi(t u)``
because ``Phi'`` vanishes along the fiber at ``t(u)``.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import (
    InfeasibleError,
    InvalidInputError,
    NehariError,
    PreconditionError,
    ProjectionError,
)
from biobb_nehari.nehari_lib.extremal import (
    DescentOptions,
    lambda_e_star,
    lambda_n_star,
    minimize_quotient,
    mu_extremal,
)
from biobb_nehari.nehari_lib.fibering import (
    CriticalPointSet,
    Exponents3,
    Exponents4,
    FiberCoefficients,
    FiberOptions,
    ProblemParams,
    critical_points,
    critical_points_3term,
    fiber_terms,
    phi_fiber,
)
from biobb_nehari.nehari_lib.quotients import lambda_u, re_lambda_4term

logger = logging.getLogger(__name__)

BRANCHES = ("plus", "minus", "rn1", "rn2")
TOL_RES = 1e-6
TOL_FIBER = 1e-9
DEGENERATE_BAND = 1e-8
SOLVER_DESCENT = DescentOptions(tol_grad=1e-10, max_iter=5000)
BRANCH_CSV_HEADER = "lambda,mu,energy,norm_gamma,residual,admissible,phi2"


def _family(branch: str) -> str:
    if branch not in BRANCHES:
        raise InvalidInputError("branch: must be one of %s" % ", ".join(BRANCHES))
    return "convex-concave" if branch in ("plus", "minus") else "two-parameter"


def make_problem(exponents, lam: float, mu: Optional[float] = None) -> ProblemParams:
    family = "two-parameter" if isinstance(exponents, Exponents4) else "convex-concave"
    return ProblemParams(family, exponents, lam, mu)


def _coefficients(u: gf.DiscreteFunction, exponents) -> FiberCoefficients:
    if u.is_zero():
        raise InvalidInputError("u: the zero function has no fiber")
    return FiberCoefficients.from_function(u, exponents)


def select_point(points: CriticalPointSet, branch: str, coeffs: FiberCoefficients, problem: ProblemParams):
    """Fiber point of ``branch``, or ``None`` when the ray misses the branch's part of the manifold."""
    if branch == "plus":
        return points[0].t if len(points) == 2 and points[0].sign > 0 else None
    if branch == "minus":
        return points[-1].t if len(points) and points[-1].sign < 0 else None
    if branch == "rn1":
        rising = [pt.t for pt in points if pt.sign > 0]
        return rising[0] if rising else None
    candidates = []
    for pt in points:
        if pt.sign < 0:
            energy = phi_fiber(coeffs, problem.lam, problem.mu, pt.t).phi
            if energy < 0:
                candidates.append((energy, pt.t))
    return min(candidates)[1] if candidates else None


@dataclass
class Projection:
    u: gf.DiscreteFunction
    t: float
    degenerate: bool
    points: CriticalPointSet


def project_to_nehari(
    u: gf.DiscreteFunction,
    lam: float,
    branch: str,
    exponents: Exponents3,
    options: Optional[FiberOptions] = None,
) -> Projection:
    """Scale ``u`` onto the plus or minus part of the convex-concave Nehari manifold."""
    if branch not in ("plus", "minus"):
        raise InvalidInputError("branch: projection is defined for 'plus' and 'minus'")
    coeffs = _coefficients(u, exponents)
    points = critical_points_3term(coeffs, lam, options)
    if not len(points):
        raise ProjectionError(
            "lambda=%g exceeds lambda(u)=%g: the fiber misses the Nehari manifold"
            % (lam, lambda_u(coeffs).value)
        )
    if points.degenerate:
        t = points[0].t
        return Projection(u.scaled(t), t, True, points)
    t = select_point(points, branch, coeffs, make_problem(exponents, lam))
    if t is None:
        raise ProjectionError("lambda=%g: no %s point on the fiber of u" % (lam, branch))
    return Projection(u.scaled(t), t, False, points)


class ReducedEnergy:
    """``J(u) = Phi(t(u) u)`` restricted to one branch; infinite where the branch point is missing."""

    def __init__(self, problem: ProblemParams, branch: str, fiber_options: Optional[FiberOptions] = None):
        if _family(branch) != problem.family:
            raise InvalidInputError("branch: %s does not belong to the %s family" % (branch, problem.family))
        self.problem = problem
        self.branch = branch
        self.fiber_options = fiber_options
        self.norm_exponent = problem.exponents.gamma
        self.name = "reduced_energy_%s" % branch

    def fiber_point(self, u: gf.DiscreteFunction) -> Optional[float]:
        if u.is_zero():
            return None
        coeffs = FiberCoefficients.from_function(u, self.problem.exponents)
        points = critical_points(coeffs, self.problem.lam, self.problem.mu, self.fiber_options)
        if points.degenerate:
            return None
        return select_point(points, self.branch, coeffs, self.problem)

    def value(self, u: gf.DiscreteFunction) -> float:
        t = self.fiber_point(u)
        if t is None:
            return math.inf
        return gf.energy(u.scaled(t), self.problem)

    def value_and_gradient(self, u: gf.DiscreteFunction):
        t = self.fiber_point(u)
        if t is None:
            return math.inf, None
        scaled = u.scaled(t)
        return gf.energy(scaled, self.problem), t * gf.energy_gradient(scaled, self.problem)


def reduced_energy(u: gf.DiscreteFunction, lam: float, mu: Optional[float], branch: str, exponents):
    """Value and nodal gradient of the reduced energy of ``branch`` at ``u``."""
    return ReducedEnergy(make_problem(exponents, lam, mu), branch).value_and_gradient(u)


@dataclass
class NehariSolution:
    u: gf.DiscreteFunction
    problem: ProblemParams
    branch: str
    energy: float
    phi2: float
    dphi: float
    residual: float
    admissible: bool
    degenerate: bool
    converged: bool
    coercivity_violations: int = 0
    norm_gamma: float = 0.0

    @property
    def lam(self) -> float:
        return self.problem.lam

    @property
    def mu(self) -> Optional[float]:
        return self.problem.mu

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "lambda": self.lam,
            "mu": self.mu,
            "energy": self.energy,
            "phi2": self.phi2,
            "dphi": self.dphi,
            "residual": self.residual,
            "admissible": self.admissible,
            "degenerate": self.degenerate,
            "converged": self.converged,
            "coercivity_violations": self.coercivity_violations,
            "norm_gamma": self.norm_gamma,
        }


def _fiber_state(u: gf.DiscreteFunction, problem: ProblemParams):
    coeffs = FiberCoefficients.from_function(u, problem.exponents)
    value = phi_fiber(coeffs, problem.lam, problem.mu, 1.0)
    return coeffs, value


def _admissible(coeffs: FiberCoefficients, problem: ProblemParams, branch: str, phi2: float) -> bool:
    if branch in ("plus", "minus"):
        return problem.lam < lambda_u(coeffs).value
    if branch == "rn1":
        return phi2 > 0
    return phi2 < 0 and re_lambda_4term(coeffs, problem.lam, 1.0) < problem.mu


def assemble_solution(
    u: gf.DiscreteFunction,
    problem: ProblemParams,
    branch: str,
    violations: int = 0,
    tol_res: float = TOL_RES,
) -> NehariSolution:
    """Evaluate energy, fiber derivatives, residual and admissibility of a point on the manifold.

    A point counts as converged when its residual passes ``tol_res``, whatever the descent reported.
    """
    coeffs, value = _fiber_state(u, problem)
    weights, powers = _fiber_weights(coeffs, problem)
    band = DEGENERATE_BAND * float(np.sum(np.abs(weights * (powers - 1.0))))
    residual = gf.residual(u, problem)
    return NehariSolution(
        u=u,
        problem=problem,
        branch=branch,
        energy=gf.energy(u, problem),
        phi2=value.ddphi,
        dphi=value.dphi,
        residual=residual,
        admissible=_admissible(coeffs, problem, branch, value.ddphi),
        degenerate=abs(value.ddphi) < band,
        converged=residual < tol_res,
        coercivity_violations=violations,
        norm_gamma=coeffs.c,
    )


def _fiber_weights(coeffs: FiberCoefficients, problem: ProblemParams):
    return fiber_terms(coeffs, problem.lam, problem.mu)


class CoercivityGuard:
    """Counts accepted iterates whose projected energy falls below the coercivity bound."""

    def __init__(self, objective: ReducedEnergy, tol: float = 1e-9):
        self.objective = objective
        self.tol = tol
        self.checked = 0
        self.violations = 0

    def __call__(self, u: gf.DiscreteFunction, value: float) -> None:
        problem = self.objective.problem
        ex = problem.exponents
        t = self.objective.fiber_point(u)
        if t is None:
            return
        coeffs = FiberCoefficients.from_function(u, ex).scaled(t)
        first = (ex.gamma - ex.p) / (ex.p * ex.gamma) * coeffs.a
        second = problem.lam * (ex.gamma - ex.q) / (ex.q * ex.gamma) * coeffs.b_q
        self.checked += 1
        if value < first - second - self.tol * (abs(first) + abs(second)):
            self.violations += 1


def solve_M(
    lam: float,
    branch: str,
    domain: gf.Domain,
    exponents: Exponents3,
    options: Optional[DescentOptions] = None,
    fiber_options: Optional[FiberOptions] = None,
    tol_res: float = TOL_RES,
) -> NehariSolution:
    """Minimizer of the convex-concave energy on the plus or minus part of the Nehari manifold."""
    if branch not in ("plus", "minus"):
        raise InvalidInputError("branch: solve_M needs 'plus' or 'minus'")
    if not lam > 0:
        raise InvalidInputError("lambda: must be positive")
    if not isinstance(exponents, Exponents3):
        raise InvalidInputError("exponents: solve_M needs q < p < gamma")
    exponents.check_dimension(domain.dimension)
    problem = make_problem(exponents, lam)
    objective = ReducedEnergy(problem, branch, fiber_options)
    guard = CoercivityGuard(objective)
    options = replace(options or SOLVER_DESCENT, monitor=guard)
    try:
        estimate = minimize_quotient(objective, domain, options, objective.name)
    except InfeasibleError:
        raise InfeasibleError(
            "lambda=%g: the %s projection fails at every start" % (lam, branch)
        ) from None
    u = estimate.minimizer.scaled(objective.fiber_point(estimate.minimizer))
    solution = assemble_solution(u, problem, branch, guard.violations, tol_res)
    logger.debug("solve_M %s lambda=%g energy=%g residual=%g", branch, lam, solution.energy, solution.residual)
    return solution


def three_term_window(
    domain: gf.Domain, exponents: Exponents4, lam: float, branch: str, options: Optional[DescentOptions] = None
) -> dict:
    """Estimated ``lambda`` bound and ``mu`` window of ``rn1``/``rn2`` from the extremal values."""
    if branch == "rn1":
        lam_bound = lambda_e_star(domain, exponents, options).value
        low = ("e", "+")
    elif branch == "rn2":
        lam_bound = lambda_n_star(domain, exponents, options).value
        low = ("e", "-")
    else:
        raise InvalidInputError("branch: window defined for 'rn1' and 'rn2'")
    if not 0 < lam < lam_bound:
        raise PreconditionError("lambda=%g outside (0, %g) for %s" % (lam, lam_bound, branch))
    n_bound = lam_bound if branch == "rn2" else lambda_n_star(domain, exponents, options).value
    mu_low = mu_extremal(domain, exponents, lam, low[1], low[0], options, bound=lam_bound).value
    mu_high = mu_extremal(domain, exponents, lam, "-", "n", options, bound=n_bound).value
    return {"lambda_bound": lam_bound, "mu_low": mu_low, "mu_high": mu_high}


def solve_three_term(
    lam: float,
    mu: float,
    branch: str,
    domain: gf.Domain,
    exponents: Exponents4,
    options: Optional[DescentOptions] = None,
    window: Optional[Mapping] = None,
    fiber_options: Optional[FiberOptions] = None,
    tol_res: float = TOL_RES,
) -> NehariSolution:
    """Minimizer over ``RN1`` (middle fiber point) or ``RN2`` (falling point with negative energy)."""
    if branch not in ("rn1", "rn2"):
        raise InvalidInputError("branch: solve_three_term needs 'rn1' or 'rn2'")
    if not isinstance(exponents, Exponents4):
        raise InvalidInputError("exponents: solve_three_term needs q < alpha < p < gamma")
    exponents.check_dimension(domain.dimension)
    window = window or three_term_window(domain, exponents, lam, branch, options)
    if not 0 < lam < window["lambda_bound"]:
        raise PreconditionError("lambda=%g outside (0, %g) for %s" % (lam, window["lambda_bound"], branch))
    if not window["mu_low"] < mu < window["mu_high"]:
        raise PreconditionError(
            "mu=%g outside the %s window (%g, %g)" % (mu, branch, window["mu_low"], window["mu_high"])
        )
    problem = make_problem(exponents, lam, mu)
    objective = ReducedEnergy(problem, branch, fiber_options)
    options = options or SOLVER_DESCENT
    try:
        estimate = minimize_quotient(objective, domain, options, objective.name)
    except InfeasibleError:
        raise InfeasibleError(
            "lambda=%g mu=%g: no start reaches the %s constraint set" % (lam, mu, branch)
        ) from None
    u = estimate.minimizer.scaled(objective.fiber_point(estimate.minimizer))
    return assemble_solution(u, problem, branch, 0, tol_res)


@dataclass
class BranchRow:
    lam: float
    mu: Optional[float]
    energy: float
    norm_gamma: float
    residual: float
    admissible: bool
    phi2: float
    status: str = "ok"

    def csv_fields(self) -> List[str]:
        mu = "" if self.mu is None else "%.17g" % self.mu
        return [
            "%.17g" % self.lam,
            mu,
            "%.17g" % self.energy,
            "%.17g" % self.norm_gamma,
            "%.17g" % self.residual,
            "true" if self.admissible else "false",
            "%.17g" % self.phi2,
        ]


@dataclass
class BranchDiagram:
    branch: str
    parameter: str = "lambda"
    rows: List[BranchRow] = field(default_factory=list)
    limit_numeric: Optional[float] = None
    bracket: Optional[Tuple[float, float]] = None

    def to_csv_text(self) -> str:
        buffer = io.StringIO()
        buffer.write(BRANCH_CSV_HEADER + "\n")
        for row in self.rows:
            buffer.write(",".join(row.csv_fields()) + "\n")
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "parameter": self.parameter,
            "limit_numeric": self.limit_numeric,
            "bracket": list(self.bracket) if self.bracket else None,
            "rows": len(self.rows),
            "admissible_rows": sum(1 for row in self.rows if row.admissible),
        }


def _row(solution: NehariSolution) -> BranchRow:
    return BranchRow(
        solution.lam,
        solution.mu,
        solution.energy,
        solution.norm_gamma,
        solution.residual,
        solution.admissible,
        solution.phi2,
    )


def continue_branch(
    grid: Sequence[float],
    branch: str,
    domain: gf.Domain,
    exponents,
    options: Optional[DescentOptions] = None,
    lam: Optional[float] = None,
    window: Optional[Mapping] = None,
    bisect_steps: int = 20,
    bracket_tol: float = 1e-3,
) -> BranchDiagram:
    """Warm-started sweep in ``lambda`` (plus/minus) or in ``mu`` at fixed ``lam`` (rn1/rn2).

    The first failing grid value is bracketed against the last success by
    bisection; later rows are recorded as ``past-failure``.
    """
    _family(branch)
    values = [float(v) for v in grid]
    if any(not v > 0 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidInputError("grid: must be positive and strictly increasing")
    three = branch in ("rn1", "rn2")
    if three and lam is None:
        raise InvalidInputError("lambda: a mu sweep needs a fixed lambda")
    diagram = BranchDiagram(branch, "mu" if three else "lambda")
    if not values:
        return diagram
    options = options or SOLVER_DESCENT
    if three and window is None:
        window = {"lambda_bound": math.inf, "mu_low": -math.inf, "mu_high": math.inf}

    def solve(value: float, warm: Optional[gf.DiscreteFunction]) -> NehariSolution:
        step_options = replace(options, initial=(warm,) if warm is not None else ())
        if three:
            open_window = dict(window, mu_low=-math.inf, mu_high=math.inf)
            return solve_three_term(lam, value, branch, domain, exponents, step_options, open_window)
        return solve_M(value, branch, domain, exponents, step_options)

    def attempt(value: float, warm):
        try:
            solution = solve(value, warm)
        except NehariError as error:
            logger.debug("%s=%g: %s", diagram.parameter, value, error)
            return None
        return solution if solution.admissible else None

    warm = None
    last_good = None
    failed = False
    for value in values:
        if failed:
            diagram.rows.append(
                BranchRow(lam if three else value, value if three else None,
                          math.nan, math.nan, math.nan, False, math.nan, "past-failure")
            )
            continue
        solution = attempt(value, warm)
        if solution is None:
            failed = True
            diagram.rows.append(
                BranchRow(lam if three else value, value if three else None,
                          math.nan, math.nan, math.nan, False, math.nan, "failed")
            )
            if last_good is not None:
                good, bad = last_good, value
                for _ in range(bisect_steps):
                    if bad - good <= bracket_tol * good:
                        break
                    middle = 0.5 * (good + bad)
                    trial = attempt(middle, warm)
                    if trial is None:
                        bad = middle
                    else:
                        good, warm = middle, trial.u
                diagram.limit_numeric = good
                diagram.bracket = (good, bad)
            continue
        diagram.rows.append(_row(solution))
        last_good = value
        warm = solution.u
        diagram.limit_numeric = value
    return diagram


@dataclass
class VerificationReport:
    checks: List[Tuple[str, bool, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def failed(self) -> List[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": n, "passed": ok, "value": v} for n, ok, v in self.checks],
        }


def verify(solution: NehariSolution, tol_res: float = TOL_RES, tol_fiber: float = TOL_FIBER) -> VerificationReport:
    """Recompute membership, residual, fiber curvature sign and admissibility of ``solution``."""
    report = VerificationReport()
    u, problem = solution.u, solution.problem
    nonzero = not u.is_zero()
    report.checks.append(("nonzero", nonzero, u.sup_norm()))
    if not nonzero:
        return report
    coeffs, value = _fiber_state(u, problem)
    weights, powers = _fiber_weights(coeffs, problem)
    scale = float(np.sum(np.abs(weights)))
    membership = abs(value.dphi) / scale
    report.checks.append(("membership", membership < tol_fiber, membership))
    res = gf.residual(u, problem)
    report.checks.append(("residual", res < tol_res, res))
    expected = 1.0 if solution.branch in ("plus", "rn1") else -1.0
    report.checks.append(("phi2_sign", np.sign(value.ddphi) == expected, value.ddphi))
    admissible = _admissible(coeffs, problem, solution.branch, value.ddphi)
    report.checks.append(("admissible", admissible, float(admissible)))
    return report
