"""Grids, discrete functions and the integrals of the energy functionals.

Three kinds of domain are supported: the interval ``(0, L)``, the rectangle
``(0, Lx) x (0, Ly)`` (both with zero Dirichlet trace) and the ball of radius
``R`` in ``R^N`` restricted to radial functions (weight ``r^(N-1)``, zero at
``r = R``). Every integral is a cell-wise midpoint rule: function values at the
cell midpoint are the average of the cell corners and gradients are forward
differences along the cell edges, so ``integrate(t*u)`` is exactly ``t^r``
times ``integrate(u)``.
"""

from __future__ import annotations

import functools
import io
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.special import gamma as gamma_function

from biobb_nehari.nehari_lib.errors import DomainOverflowError, InvalidInputError

if TYPE_CHECKING:
    from biobb_nehari.nehari_lib.fibering import ProblemParams

logger = logging.getLogger(__name__)

DOMAIN_KINDS = ("interval", "rectangle", "radial")
FAMILIES = ("convex-concave", "two-parameter", "zero-mass")


@dataclass(frozen=True)
class Domain:
    """Uniform grid description. ``resolution`` counts nodes per axis, boundary included."""

    kind: str
    extent: tuple
    resolution: tuple
    dimension: int = 1

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise InvalidInputError("domain.kind: unknown kind %r" % (self.kind,))
        axes = 2 if self.kind == "rectangle" else 1
        extent = tuple(float(e) for e in np.atleast_1d(self.extent))
        resolution = tuple(int(n) for n in np.atleast_1d(self.resolution))
        if len(extent) != axes or len(resolution) != axes:
            raise InvalidInputError(
                "domain: %s needs %d extent and resolution entries" % (self.kind, axes)
            )
        if not all(math.isfinite(e) and e > 0 for e in extent):
            raise InvalidInputError("domain.extent: must be positive and finite")
        if not all(n >= 3 for n in resolution):
            raise InvalidInputError("domain.resolution: at least 3 nodes per axis")
        dimension = int(self.dimension)
        if self.kind == "interval" and dimension != 1:
            raise InvalidInputError("domain.dimension: an interval has dimension 1")
        if self.kind == "rectangle" and dimension != 2:
            raise InvalidInputError("domain.dimension: a rectangle has dimension 2")
        if self.kind == "radial" and dimension < 3:
            raise InvalidInputError("domain.dimension: radial domains need N >= 3")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "dimension", dimension)

    @classmethod
    def interval(cls, length: float = 1.0, nodes: int = 101) -> "Domain":
        return cls("interval", (length,), (nodes,), 1)

    @classmethod
    def rectangle(cls, lx: float, ly: float, nx: int, ny: int) -> "Domain":
        return cls("rectangle", (lx, ly), (nx, ny), 2)

    @classmethod
    def radial(cls, radius: float, nodes: int, dimension: int = 3) -> "Domain":
        return cls("radial", (radius,), (nodes,), dimension)

    @classmethod
    def from_dict(cls, spec: Mapping) -> "Domain":
        """Build a domain from a configuration mapping (``kind``, ``extent``, ``resolution``, ``dimension``)."""
        if not isinstance(spec, Mapping):
            raise InvalidInputError("domain: expected a mapping, got %r" % (spec,))
        kind = spec.get("kind", "interval")
        default_dimension = {"interval": 1, "rectangle": 2}.get(kind, 3)
        return cls(
            kind,
            tuple(np.atleast_1d(spec.get("extent", 1.0))),
            tuple(np.atleast_1d(spec.get("resolution", 101))),
            int(spec.get("dimension", default_dimension)),
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "extent": list(self.extent),
            "resolution": list(self.resolution),
            "dimension": self.dimension,
        }

    @property
    def spacing(self) -> tuple:
        return tuple(e / (n - 1) for e, n in zip(self.extent, self.resolution))

    @property
    def interior_shape(self) -> tuple:
        if self.kind == "radial":
            return (self.resolution[0] - 1,)
        return tuple(n - 2 for n in self.resolution)

    @property
    def size(self) -> int:
        return int(np.prod(self.interior_shape))

    def refined(self, factor: int) -> "Domain":
        """Same domain with ``factor`` times more cells per axis."""
        factor = int(factor)
        if factor < 1:
            raise InvalidInputError("grid_refine: must be a positive integer")
        return Domain(
            self.kind,
            self.extent,
            tuple((n - 1) * factor + 1 for n in self.resolution),
            self.dimension,
        )

    def scaled(self, sigma: float) -> "Domain":
        """Same node count on an extent multiplied by ``sigma``."""
        if not sigma > 0:
            raise InvalidInputError("sigma: must be positive")
        return Domain(
            self.kind,
            tuple(e * sigma for e in self.extent),
            self.resolution,
            self.dimension,
        )


@dataclass
class DiscreteFunction:
    """Nodal values of a function at the unknown nodes of ``domain``."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.domain.size:
            raise InvalidInputError(
                "values: expected %d interior nodes, got %d" % (self.domain.size, values.size)
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("values: non-finite entries")
        self.values = values

    def scaled(self, t: float) -> "DiscreteFunction":
        return DiscreteFunction(self.domain, t * self.values)

    def with_values(self, values: np.ndarray) -> "DiscreteFunction":
        return DiscreteFunction(self.domain, values)

    def full_values(self) -> np.ndarray:
        """Values on every node of the grid, boundary zeros included."""
        if self.domain.kind == "radial":
            return np.append(self.values, 0.0)
        full = np.zeros(self.domain.resolution)
        inner = tuple(slice(1, -1) for _ in self.domain.resolution)
        full[inner] = self.values.reshape(self.domain.interior_shape)
        return full

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass(frozen=True)
class IntegralBundle:
    """``grad_p`` is the integral of ``|grad u|^grad_exponent``, ``lebesgue[r]`` the integral of ``|u|^r``."""

    grad_p: float
    grad_exponent: float
    lebesgue: Mapping = field(default_factory=dict)

    def __getitem__(self, r: float) -> float:
        return self.lebesgue[float(r)]

    def replace(self, grad_p: Optional[float] = None, **by_exponent) -> "IntegralBundle":
        lebesgue = dict(self.lebesgue)
        for key, value in by_exponent.items():
            lebesgue[float(key)] = value
        return IntegralBundle(
            self.grad_p if grad_p is None else grad_p, self.grad_exponent, lebesgue
        )


@dataclass(frozen=True)
class CellOperators:
    avg: sp.csr_matrix
    grads: tuple
    measure: np.ndarray
    weights: np.ndarray
    stiffness: sp.csc_matrix


def sphere_area(dimension: int) -> float:
    """Surface area of the unit sphere in ``R^dimension``."""
    return 2.0 * math.pi ** (dimension / 2.0) / float(gamma_function(dimension / 2.0))


def _axis_operators(n: int, h: float, free: np.ndarray):
    cells = n - 1
    rows = np.arange(cells)
    ones = np.ones(cells)
    lower = sp.csr_matrix((ones, (rows, rows)), shape=(cells, n))
    upper = sp.csr_matrix((ones, (rows, rows + 1)), shape=(cells, n))
    embed = sp.csr_matrix(
        (np.ones(free.size), (free, np.arange(free.size))), shape=(n, free.size)
    )
    return lower, upper, embed


@functools.lru_cache(maxsize=64)
def operators(domain: Domain) -> CellOperators:
    """Sparse midpoint, gradient and measure operators of ``domain``."""
    if domain.kind == "rectangle":
        (nx, ny), (hx, hy) = domain.resolution, domain.spacing
        lx, ux, ex = _axis_operators(nx, hx, np.arange(1, nx - 1))
        ly, uy, ey = _axis_operators(ny, hy, np.arange(1, ny - 1))
        embed = sp.kron(ex, ey)
        avg = sp.kron(0.5 * (lx + ux), 0.5 * (ly + uy)) @ embed
        grads = (
            sp.kron((ux - lx) / hx, ly) @ embed,
            sp.kron(lx, (uy - ly) / hy) @ embed,
        )
        measure = np.full(avg.shape[0], hx * hy)
    else:
        n, h = domain.resolution[0], domain.spacing[0]
        free = np.arange(n - 1) if domain.kind == "radial" else np.arange(1, n - 1)
        lower, upper, embed = _axis_operators(n, h, free)
        avg = 0.5 * (lower + upper) @ embed
        grads = (((upper - lower) / h) @ embed,)
        if domain.kind == "radial":
            N = domain.dimension
            r = h * np.arange(n)
            measure = sphere_area(N) * (r[1:] ** N - r[:-1] ** N) / N
        else:
            measure = np.full(n - 1, h)
    avg = sp.csr_matrix(avg)
    grads = tuple(sp.csr_matrix(g) for g in grads)
    weights = np.asarray(avg.T @ measure).reshape(-1)
    mass = sp.diags(measure)
    stiffness = sum(g.T @ mass @ g for g in grads)
    return CellOperators(avg, grads, measure, weights, sp.csc_matrix(stiffness))


@functools.lru_cache(maxsize=64)
def stiffness_factor(domain: Domain):
    """LU factor of the ``p = 2`` stiffness matrix, used as descent preconditioner."""
    return splu(operators(domain).stiffness)


def nodal_weights(domain: Domain) -> np.ndarray:
    """Lumped mass of every unknown node."""
    return operators(domain).weights


def coordinates(domain: Domain) -> np.ndarray:
    """Coordinates of the unknown nodes, shape ``(size, axes)``."""
    axes = [np.linspace(0.0, e, n) for e, n in zip(domain.extent, domain.resolution)]
    if domain.kind == "radial":
        return axes[0][:-1, None]
    inner = [a[1:-1] for a in axes]
    mesh = np.meshgrid(*inner, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _check_exponents(exponents: Sequence[float], grad_exponent: float) -> tuple:
    exps = tuple(float(r) for r in exponents)
    if not all(r > 1 for r in exps) or not grad_exponent > 1:
        raise InvalidInputError("exponents: every exponent must be greater than 1")
    return exps


def _cell_fields(u: DiscreteFunction):
    if not np.all(np.isfinite(u.values)):
        raise InvalidInputError("values: non-finite entries")
    ops = operators(u.domain)
    mid = ops.avg @ u.values
    slopes = [g @ u.values for g in ops.grads]
    magnitude = np.sqrt(sum(s * s for s in slopes))
    return ops, mid, slopes, magnitude


def integrate(
    u: DiscreteFunction, exponents: Sequence[float], grad_exponent: float = 2.0
) -> IntegralBundle:
    """Midpoint quadrature of ``int |grad u|^grad_exponent`` and ``int |u|^r`` for every ``r``."""
    exps = _check_exponents(exponents, grad_exponent)
    ops, mid, _, magnitude = _cell_fields(u)
    grad_p = float(ops.measure @ magnitude**grad_exponent)
    absmid = np.abs(mid)
    lebesgue = {r: float(ops.measure @ absmid**r) for r in exps}
    return IntegralBundle(grad_p, float(grad_exponent), lebesgue)


def integral_gradients(
    u: DiscreteFunction, exponents: Sequence[float], grad_exponent: float = 2.0
):
    """Exact nodal gradients of the integrals returned by :func:`integrate`."""
    exps = _check_exponents(exponents, grad_exponent)
    ops, mid, slopes, magnitude = _cell_fields(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(magnitude > 0, magnitude ** (grad_exponent - 2.0), 0.0)
    factor = grad_exponent * ops.measure * factor
    grad_p = sum(g.T @ (factor * s) for g, s in zip(ops.grads, slopes))
    lebesgue = {
        r: ops.avg.T @ (ops.measure * r * np.sign(mid) * np.abs(mid) ** (r - 1.0))
        for r in exps
    }
    return np.asarray(grad_p, dtype=float).reshape(-1), lebesgue


def _energy_terms(problem: "ProblemParams"):
    if getattr(problem, "family", None) not in FAMILIES:
        raise InvalidInputError(
            "family: unknown problem family %r" % (getattr(problem, "family", None),)
        )
    return problem.energy_terms()


def energy(u: DiscreteFunction, problem: "ProblemParams") -> float:
    """Discrete energy ``(1/P) int |grad u|^P + sum_k (c_k / r_k) int |u|^r_k`` of ``problem``."""
    grad_exponent, terms = _energy_terms(problem)
    bundle = integrate(u, [r for _, r in terms], grad_exponent)
    return bundle.grad_p / grad_exponent + sum(c / r * bundle[r] for c, r in terms)


def energy_gradient(u: DiscreteFunction, problem: "ProblemParams") -> np.ndarray:
    grad_exponent, terms = _energy_terms(problem)
    grad_p, lebesgue = integral_gradients(u, [r for _, r in terms], grad_exponent)
    gradient = grad_p / grad_exponent
    for c, r in terms:
        gradient = gradient + c / r * lebesgue[float(r)]
    return gradient


def residual(u: DiscreteFunction, problem: "ProblemParams") -> float:
    """Sup-norm of the discrete weak-form residual, scaled by the lumped nodal mass."""
    gradient = energy_gradient(u, problem)
    if gradient.size == 0:
        return 0.0
    return float(np.max(np.abs(gradient / nodal_weights(u.domain))))


def support_radius(u: DiscreteFunction) -> float:
    if u.domain.kind != "radial":
        raise InvalidInputError("support_radius: radial domains only")
    full = u.full_values()
    nonzero = np.flatnonzero(full)
    if nonzero.size == 0:
        return 0.0
    h = u.domain.spacing[0]
    return h * min(nonzero[-1] + 1, full.size - 1)


def dilate(u: DiscreteFunction, sigma: float) -> DiscreteFunction:
    """Resample ``x -> u(x / sigma)`` on the same radial grid by linear interpolation."""
    if u.domain.kind != "radial":
        raise InvalidInputError("dilate: radial domains only")
    if not (math.isfinite(sigma) and sigma > 0):
        raise InvalidInputError("sigma: must be positive")
    radius = u.domain.extent[0]
    if sigma * support_radius(u) > radius * (1.0 + 1e-12):
        raise DomainOverflowError(
            "sigma=%g moves the support beyond the truncation radius %g" % (sigma, radius)
        )
    n, h = u.domain.resolution[0], u.domain.spacing[0]
    r = h * np.arange(n)
    values = np.interp(r[:-1] / sigma, r, u.full_values(), right=0.0)
    return DiscreteFunction(u.domain, values)


def rescale(u: DiscreteFunction, sigma: float) -> DiscreteFunction:
    """Exact dilation: unchanged nodal values on the grid scaled by ``sigma``."""
    return DiscreteFunction(u.domain.scaled(sigma), u.values)


def from_callable(domain: Domain, func: Callable) -> DiscreteFunction:
    coords = coordinates(domain)
    return DiscreteFunction(domain, func(*coords.T))


def hat(
    domain: Domain,
    center: Optional[Sequence[float]] = None,
    height: float = 1.0,
    width: Optional[float] = None,
) -> DiscreteFunction:
    """Tent function vanishing on the boundary (radial: ``height * (1 - r/width)_+``)."""
    if domain.kind == "radial":
        w = width or domain.extent[0]
        return from_callable(domain, lambda r: height * np.clip(1.0 - r / w, 0.0, None))
    center = tuple(np.atleast_1d(center if center is not None else [e / 2 for e in domain.extent]))
    coords = coordinates(domain)
    values = np.full(coords.shape[0], float(height))
    for axis, (c, e) in enumerate(zip(center, domain.extent)):
        w = width or min(c, e - c)
        values = values * np.clip(1.0 - np.abs(coords[:, axis] - c) / w, 0.0, None)
    return DiscreteFunction(domain, values)


def eigen_shape(domain: Domain) -> DiscreteFunction:
    """Positive profile of the first Dirichlet eigenfunction (radial: ``sinc(r/R)``)."""
    coords = coordinates(domain)
    if domain.kind == "radial":
        return DiscreteFunction(domain, np.sinc(coords[:, 0] / domain.extent[0]))
    values = np.ones(coords.shape[0])
    for axis, e in enumerate(domain.extent):
        values = values * np.sin(np.pi * coords[:, axis] / e)
    return DiscreteFunction(domain, values)


def random_positive(domain: Domain, rng: np.random.Generator) -> DiscreteFunction:
    base = eigen_shape(domain).values
    return DiscreteFunction(domain, base * rng.uniform(0.5, 1.5, base.size))


def to_csv_text(u: DiscreteFunction) -> str:
    """CSV with header ``index,coord...,value`` (radial coordinate named ``r``)."""
    names = {"interval": ["x"], "rectangle": ["x", "y"], "radial": ["r"]}[u.domain.kind]
    coords = coordinates(u.domain)
    buffer = io.StringIO()
    buffer.write(",".join(["index"] + names + ["value"]) + "\n")
    for index, (point, value) in enumerate(zip(coords, u.values)):
        fields = [str(index)] + ["%.17g" % c for c in point] + ["%.17g" % value]
        buffer.write(",".join(fields) + "\n")
    return buffer.getvalue()


def read_csv(path: str, domain: Domain) -> DiscreteFunction:
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return DiscreteFunction(domain, table[:, -1])
