"""Prescribed-energy solutions of the zero-mass problem on a truncated radial grid.

The equation ``-Lap u - mu |u|^(p-2) u + |u|^(q-2) u = 0`` has energy
``E_mu(u) = T/2 - mu A/p + B/q`` with ``T = int|grad u|^2``, ``A = int|u|^p``
and ``B = int|u|^q``. Every quotient below is a function of ``(T, A, B)``.
Dilations ``u(x/sigma)`` are applied exactly by scaling the grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Tuple

import numpy as np

from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import InvalidInputError, NonexistenceError
from biobb_nehari.nehari_lib.extremal import DescentOptions, IntegralQuotient, minimize_quotient
from biobb_nehari.nehari_lib.fibering import geometric_grid
from biobb_nehari.nehari_lib.quotients import QuotientValue

logger = logging.getLogger(__name__)

TRUNCATION_SHELL = 0.1
TRUNCATION_FRACTION = 0.01
TOL_RESIDUAL = 1e-4
ZERO_MASS_DESCENT = DescentOptions(tol_grad=1e-8, max_iter=5000, starts=3)


@dataclass(frozen=True)
class ZeroMassParams:
    N: int
    p: float
    q: float
    E: float
    R: float = 30.0
    resolution: int = 600

    family = "zero-mass"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise InvalidInputError("N: the zero-mass problem needs an integer N >= 3")
        for name in ("p", "q", "E", "R"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError("%s: must be finite" % name)
        if not 2 < min(self.p, self.q):
            raise InvalidInputError("exponents.p/q: must be greater than 2")
        if not max(self.p, self.q) < self.two_star:
            raise InvalidInputError("exponents.p/q: must stay below 2* = %g" % self.two_star)
        if self.p == self.q:
            raise InvalidInputError("exponents.p/q: must differ")
        if not self.E > 0:
            raise InvalidInputError("E: prescribed energy must be positive")
        if not self.R > 0:
            raise InvalidInputError("R: truncation radius must be positive")
        if int(self.resolution) < 3:
            raise InvalidInputError("resolution: at least 3 radial nodes")

    @classmethod
    def from_dict(cls, spec: Mapping) -> "ZeroMassParams":
        try:
            return cls(
                int(spec["N"]),
                float(spec["p"]),
                float(spec["q"]),
                float(spec["E"]),
                float(spec.get("R", 30.0)),
                int(spec.get("resolution", 600)),
            )
        except KeyError as missing:
            raise InvalidInputError("zero_mass.%s: missing" % missing.args[0]) from None

    @property
    def two_star(self) -> float:
        return 2.0 * self.N / (self.N - 2)

    @property
    def existence(self) -> bool:
        return self.q < self.p

    @property
    def beta(self) -> float:
        s = self.two_star
        return 2 * self.q * (s - self.p) / (s * (self.p - self.q))

    @property
    def rho(self) -> float:
        s = self.two_star
        return 2 * self.p * (s - self.q) / (s * (self.p - self.q))

    def domain(self) -> gf.Domain:
        return gf.Domain.radial(self.R, int(self.resolution), int(self.N))

    def to_dict(self) -> dict:
        return {"N": self.N, "p": self.p, "q": self.q, "E": self.E, "R": self.R, "resolution": self.resolution}


@dataclass(frozen=True)
class ZeroMassProblem:
    """Zero-mass energy at a fixed ``mu``, in the form used by ``gridfield.energy``."""

    params: ZeroMassParams
    mu: float
    family: str = "zero-mass"

    def energy_terms(self):
        return 2.0, [(-self.mu, self.params.p), (1.0, self.params.q)]


def integrals(u: gf.DiscreteFunction, params: ZeroMassParams) -> Tuple[float, float, float]:
    """``(T, A, B)`` of ``u``."""
    bundle = gf.integrate(u, (params.p, params.q), 2.0)
    return bundle.grad_p, bundle[params.p], bundle[params.q]


def _positive(**values) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise InvalidInputError("%s: must be positive" % name)


def sigma_E(T: float, E: float, N: int) -> float:
    """Dilation at which ``R^E(u_sigma)`` is stationary."""
    _positive(T=T)
    return (N * E / T) ** (1.0 / (N - 2))


def energy_E(T: float, A: float, B: float, mu: float, params: ZeroMassParams) -> float:
    return T / 2.0 - mu * A / params.p + B / params.q


def r_E(T: float, A: float, B: float, params: ZeroMassParams) -> float:
    """Level ``mu`` at which ``E_mu(u) = E``."""
    _positive(A=A)
    return params.p * (T / 2.0 + B / params.q - params.E) / A


def r_E_dilated(T: float, A: float, B: float, sigma: float, params: ZeroMassParams) -> float:
    """``R^E(u_sigma)`` through the dilation identities."""
    N = params.N
    return r_E(sigma ** (N - 2) * T, sigma**N * A, sigma**N * B, params)


def c_N_E(N: int, E: float) -> float:
    return (N - 2) / (N ** (N / (N - 2)) * E ** (2.0 / (N - 2)))


def M_E(T: float, A: float, B: float, params: ZeroMassParams) -> float:
    """``R^E`` at the stationary dilation, free of ``sigma``."""
    _positive(T=T, A=A, B=B)
    N = params.N
    return params.p / A * (c_N_E(N, params.E) / 2.0 * T ** (N / (N - 2)) + B / params.q)


def c_pqNE(params: ZeroMassParams) -> float:
    s = params.two_star
    return c_N_E(params.N, params.E) * params.q * (s - params.p) / (2.0 * (params.p - params.q))


def C_pqNE(params: ZeroMassParams) -> float:
    """Constant of the closed form of ``mu^E``; at ``E = 1`` this is ``c(p, q, N)``."""
    s, p, q = params.two_star, params.p, params.q
    k = c_pqNE(params)
    c = c_N_E(params.N, params.E)
    return p * (c / 2.0 * k ** (-(s - p) / (s - q)) + k ** ((p - q) / (s - q)) / q)


def c_pqN(params: ZeroMassParams) -> float:
    return C_pqNE(replace(params, E=1.0))


def _require_existence(params: ZeroMassParams) -> None:
    if not params.existence:
        raise NonexistenceError(
            "p=%g < q=%g: the zero-mass problem has no solution, see the nonexistence certificate"
            % (params.p, params.q)
        )


def t_E(T: float, B: float, params: ZeroMassParams) -> float:
    _require_existence(params)
    _positive(T=T, B=B)
    N = params.N
    return (B / (c_pqNE(params) * T ** (N / (N - 2)))) ** (1.0 / (params.two_star - params.q))


def mu_E(T: float, A: float, B: float, params: ZeroMassParams) -> QuotientValue:
    """Minimum of ``M^E(t u)`` over ``t``, by substituting the realizer ``t^E``."""
    t = t_E(T, B, params)
    value = M_E(t * t * T, t**params.p * A, t**params.q * B, params)
    return QuotientValue(value, t, "e-quotient", "mu_E")


def mu_E_closed(T: float, A: float, B: float, params: ZeroMassParams) -> float:
    _require_existence(params)
    s, p, q = params.two_star, params.p, params.q
    return C_pqNE(params) * B ** ((s - p) / (s - q)) * T ** (s * (p - q) / (2 * (s - q))) / A


def mu_gn(T: float, A: float, B: float, params: ZeroMassParams) -> float:
    """Gagliardo-Nirenberg quotient ``||u||_q^beta ||grad u||_2^2 / ||u||_p^rho``."""
    _positive(T=T, A=A, B=B)
    return B ** (params.beta / params.q) * T / A ** (params.rho / params.p)


def relation_constant(params: ZeroMassParams) -> dict:
    """``mu^E(u) = constant * mu(u)^(p/rho)``; also the printed E-scaling split."""
    _require_existence(params)
    s = params.two_star
    e_power = 2 * (params.p - params.q) / ((s - params.q) * (params.N - 2))
    return {
        "constant": C_pqNE(params),
        "c_pqN": c_pqN(params),
        "energy_power": e_power,
        "from_split": c_pqN(params) / params.E**e_power,
        "mu_power": params.p / params.rho,
    }


def gn_quotient(params: ZeroMassParams) -> IntegralQuotient:
    p, q = float(params.p), float(params.q)

    def reduce(bundle):
        T, A, B = bundle.grad_p, bundle[p], bundle[q]
        if not (T > 0 and A > 0 and B > 0):
            return math.inf
        return mu_gn(T, A, B, params)

    def partials(bundle):
        T, A, B = bundle.grad_p, bundle[p], bundle[q]
        value = mu_gn(T, A, B, params)
        return value / T, {p: -value * params.rho / (p * A), q: value * params.beta / (q * B)}

    return IntegralQuotient(reduce, 2.0, (p, q), partials, name="mu_gn", norm_exponent=q)


def normalize_pq(u: gf.DiscreteFunction, params: ZeroMassParams) -> gf.DiscreteFunction:
    """Amplitude and exact dilation that bring ``||u||_p`` and ``||u||_q`` to 1."""
    _, A, B = integrals(u, params)
    _positive(A=A, B=B)
    p, q = params.p, params.q
    t = (B / A) ** (1.0 / (p - q))
    sigma = (A**q / B**p) ** (1.0 / (params.N * (p - q)))
    return gf.rescale(u.scaled(t), sigma)


@dataclass
class NonexistenceCertificate:
    issued: bool
    samples: int
    sign_changes: int
    min_derivative: float
    exponent_checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "issued": self.issued,
            "samples": self.samples,
            "sign_changes": self.sign_changes,
            "min_derivative": self.min_derivative,
            "exponent_checks": dict(self.exponent_checks),
        }


def fiber_derivative_M_E(T: float, A: float, B: float, t, params: ZeroMassParams):
    """``d/dt M^E(t u)``."""
    s, p, q = params.two_star, params.p, params.q
    t = np.asarray(t, dtype=float)
    Tn = T ** (params.N / (params.N - 2))
    c = c_N_E(params.N, params.E)
    return p / A * (c / 2.0 * Tn * (s - p) * t ** (s - p - 1) + B * (q - p) / q * t ** (q - p - 1))


def nonexistence_certificate(
    params: ZeroMassParams, samples: int = 20, seed: int = 0, resolution: int = 200
) -> NonexistenceCertificate:
    """Monotonicity of ``t -> M^E(t u)`` for ``p < q`` on seeded radial samples."""
    if params.existence:
        raise InvalidInputError("exponents.p/q: the certificate applies to p < q")
    domain = gf.Domain.radial(params.R, resolution, params.N)
    grid = geometric_grid()
    changes = 0
    minimum = math.inf
    for i in range(samples):
        u = gf.random_positive(domain, np.random.default_rng([seed, i]))
        T, A, B = integrals(u, params)
        derivative = fiber_derivative_M_E(T, A, B, grid, params)
        scale = np.abs(derivative)
        minimum = min(minimum, float(np.min(derivative / scale)))
        signs = np.sign(derivative)
        changes += int(np.count_nonzero(signs[1:] != signs[:-1]))
    checks = {
        "two_star_minus_p": params.two_star - params.p,
        "q_minus_p": params.q - params.p,
    }
    issued = changes == 0 and minimum > 0 and all(v > 0 for v in checks.values())
    return NonexistenceCertificate(issued, samples, changes, minimum, checks)


@dataclass
class PrescribedEnergySolution:
    u: gf.DiscreteFunction
    mu_hat: float
    mu_hat_closed: float
    mu_bar: float
    energy_achieved: float
    sigma_check: float
    t_check: float
    residual: float
    radius: float
    converged: bool
    truncation_warning: bool
    params: ZeroMassParams

    def to_dict(self) -> dict:
        return {
            "mu_bar": self.mu_bar,
            "mu_hat": self.mu_hat,
            "mu_hat_closed": self.mu_hat_closed,
            "E": self.params.E,
            "energy_achieved": self.energy_achieved,
            "checks": {"sigma": self.sigma_check, "t": self.t_check},
            "residual": self.residual,
            "radius": self.radius,
            "converged": self.converged,
            "truncation_warning": self.truncation_warning,
        }


def truncation_fraction(u: gf.DiscreteFunction, exponent: float, shell: float = TRUNCATION_SHELL) -> float:
    """Share of ``int |u|^exponent`` carried by the outer ``shell`` of the radius."""
    ops = gf.operators(u.domain)
    density = ops.measure * np.abs(ops.avg @ u.values) ** exponent
    h = u.domain.spacing[0]
    midpoints = h * (np.arange(density.size) + 0.5)
    total = float(density.sum())
    if total == 0:
        return 0.0
    outer = float(density[midpoints > (1.0 - shell) * u.domain.extent[0]].sum())
    return outer / total


def decaying_start(domain: gf.Domain, width: float) -> gf.DiscreteFunction:
    radius = domain.extent[0]
    floor = 1.0 / (1.0 + (radius / width) ** 2)
    return gf.from_callable(domain, lambda r: 1.0 / (1.0 + (r / width) ** 2) - floor)


def solve_prescribed_energy(
    params: ZeroMassParams, options: Optional[DescentOptions] = None
) -> PrescribedEnergySolution:
    """Minimize ``mu(u)``, then rescale the minimizer so that both scaling checks equal 1."""
    _require_existence(params)
    domain = params.domain()
    options = options or ZERO_MASS_DESCENT
    radius = params.R
    initial = tuple(options.initial) or (decaying_start(domain, radius / 10.0), decaying_start(domain, radius / 20.0))
    options = replace(options, initial=initial, starts=max(options.starts, len(initial)))
    estimate = minimize_quotient(gn_quotient(params), domain, options, "mu_bar")
    u = estimate.minimizer
    fraction = truncation_fraction(u, params.q)
    T, A, B = integrals(u, params)
    v1 = u.scaled(t_E(T, B, params))
    sigma = sigma_E(integrals(v1, params)[0], params.E, params.N)
    v2 = gf.rescale(v1, sigma)
    T2, A2, B2 = integrals(v2, params)
    mu_hat = mu_E(T2, A2, B2, params).value
    residual = gf.residual(v2, ZeroMassProblem(params, mu_hat))
    solution = PrescribedEnergySolution(
        u=v2,
        mu_hat=mu_hat,
        mu_hat_closed=relation_constant(params)["constant"] * estimate.value ** (params.p / params.rho),
        mu_bar=estimate.value,
        energy_achieved=energy_E(T2, A2, B2, mu_hat, params),
        sigma_check=sigma_E(T2, params.E, params.N),
        t_check=t_E(T2, B2, params),
        residual=residual,
        radius=v2.domain.extent[0],
        converged=estimate.converged or residual < TOL_RESIDUAL,
        truncation_warning=fraction >= TRUNCATION_FRACTION,
        params=params,
    )
    if solution.truncation_warning:
        logger.warning(
            "%.1f%% of int|u|^q lies in the outer shell of the truncation radius", 100 * fraction
        )
    return solution


def profile_csv_text(u: gf.DiscreteFunction) -> str:
    """Radial profile with header ``r,value``."""
    r = gf.coordinates(u.domain)[:, 0]
    lines = ["r,value"] + ["%.17g,%.17g" % (ri, vi) for ri, vi in zip(r, u.values)]
    return "\n".join(lines) + "\n"
