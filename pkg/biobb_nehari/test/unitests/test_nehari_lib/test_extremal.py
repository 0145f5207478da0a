# type: ignore
import math

import numpy as np
import pytest
from biobb_nehari.nehari_lib import extremal as ne
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib.errors import InvalidInputError, InvalidQuotientError, PreconditionError
from biobb_nehari.nehari_lib.fibering import Exponents3, Exponents4

THREE = Exponents3(1.5, 2.0, 3.0)
FOUR = Exponents4(1.2, 1.5, 2.0, 3.0)
SMALL = ne.DescentOptions(starts=2, max_iter=800, seed=0, threads=1)


class TestDescentOptions():
    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            ne.DescentOptions(starts=0)
        with pytest.raises(InvalidInputError):
            ne.DescentOptions(tol_grad=0.0)
        with pytest.raises(InvalidInputError):
            ne.DescentOptions(armijo=1.5)



class FlatObjective():
    """Only the start point scores 1; every move scores 2, so the line search never succeeds."""
    norm_exponent = None
    name = 'flat'

    def __init__(self, slope):
        self.slope = slope
        self.start = None

    def value(self, u):
        return 1.0 if np.array_equal(u.values, self.start) else 2.0

    def value_and_gradient(self, u):
        if self.start is None:
            self.start = u.values.copy()
        return self.value(u), self.slope * gf.nodal_weights(u.domain)


class TestStalledSearch():
    domain = gf.Domain.interval(1.0, 21)
    options = ne.DescentOptions(starts=1, max_backtracks=5, threads=1)

    def test_small_gradient_counts_as_converged(self):
        result = ne.descend(FlatObjective(1e-6), gf.eigen_shape(self.domain), self.options)
        assert result.stalled
        assert result.converged
        assert result.gradient_norm == pytest.approx(1e-6)

    def test_large_gradient_is_not_converged(self):
        result = ne.descend(FlatObjective(1e-2), gf.eigen_shape(self.domain), self.options)
        assert result.stalled
        assert not result.converged

    def test_tolerance_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            ne.DescentOptions(tol_stall=0.0)


class TestRayleigh():
    def test_first_eigenvalue(self):
        estimate = ne.minimize_quotient(ne.rayleigh_quotient(), gf.Domain.interval(1.0, 101), ne.DescentOptions(starts=1, threads=1))
        assert estimate.value == pytest.approx(math.pi ** 2, rel=1e-2)
        assert np.all(estimate.minimizer.values >= 0)
        assert estimate.to_dict()['grid']['resolution'] == [101]

    def test_seeded(self):
        domain = gf.Domain.interval(1.0, 31)
        first = ne.minimize_quotient(ne.rayleigh_quotient(), domain, SMALL)
        second = ne.minimize_quotient(ne.rayleigh_quotient(), domain, SMALL)
        assert first.value == second.value
        assert first.per_start_values == second.per_start_values


class TestHomogeneity():
    def test_not_homogeneous(self):
        with pytest.raises(InvalidQuotientError):
            ne.minimize_quotient(lambda u: float(np.sum(u.values ** 2)), gf.Domain.interval(1.0, 11), SMALL)

    def test_not_callable(self):
        with pytest.raises(InvalidInputError):
            ne.minimize_quotient(3.0, gf.Domain.interval(1.0, 11), SMALL)


class TestGradients():
    def test_monomial(self):
        quotient = ne.monomial_quotient(nq.monomial('lambda', THREE))
        u = gf.random_positive(gf.Domain.interval(1.0, 31), np.random.default_rng(1))
        assert ne.gradient_check(quotient, u) < 1e-5

    def test_mu_quotient(self):
        quotient = ne.mu_quotient(FOUR, 0.5, '+', 'n')
        u = gf.random_positive(gf.Domain.interval(1.0, 21), np.random.default_rng(2))
        assert math.isfinite(quotient(u))
        assert ne.gradient_check(quotient, u) < 1e-4

    def test_zero_function(self):
        quotient = ne.rayleigh_quotient()
        u = gf.DiscreteFunction(gf.Domain.interval(1.0, 11), np.zeros(9))
        with pytest.raises(InvalidInputError):
            ne.gradient_check(quotient, u)


class TestExtremalValues():
    def test_lambda_star_below_trial(self):
        domain = gf.Domain.interval(1.0, 41)
        estimate = ne.lambda_star(domain, THREE, SMALL)
        trial = ne.monomial_quotient(nq.monomial('lambda', THREE))(gf.eigen_shape(domain))
        assert 0 < estimate.value <= trial * (1 + 1e-10)
        report = ne.audit(estimate, ne.monomial_quotient(nq.monomial('lambda', THREE)), trials=6)
        assert report['violations'] == 0
        assert len(report['trial_values']) == 6

    def test_energy_level_below_nehari(self):
        domain = gf.Domain.interval(1.0, 31)
        lam_n = ne.lambda_n_star(domain, FOUR, SMALL)
        lam_e = ne.lambda_e_star(domain, FOUR, SMALL)
        assert lam_e.value < lam_n.value

    def test_mu_precondition(self):
        with pytest.raises(PreconditionError):
            ne.mu_extremal(gf.Domain.interval(1.0, 21), FOUR, 5.0, '+', 'n', SMALL, bound=1.0)

    def test_refinement_rows(self):
        rows = ne.refinement_study(
            lambda d: ne.minimize_quotient(ne.rayleigh_quotient(), d, SMALL), gf.Domain.interval(1.0, 21), (1, 2)
        )
        assert [r['resolution'] for r in rows] == [[21], [41]]
        assert rows[0]['relative_change'] is None
        assert rows[1]['relative_change'] < 0.05

    def test_mu_levels_ordered(self):
        domain = gf.Domain.interval(1.0, 21)
        lam_n = ne.lambda_n_star(domain, FOUR, SMALL).value
        lam_e = ne.lambda_e_star(domain, FOUR, SMALL).value
        lam = 0.5 * lam_e
        levels = [
            ne.mu_extremal(domain, FOUR, lam, sign, flavor, SMALL, bound=lam_n if flavor == 'n' else lam_e).value
            for sign, flavor in (('+', 'n'), ('+', 'e'), ('-', 'e'), ('-', 'n'))
        ]
        assert all(math.isfinite(level) and level > 0 for level in levels)
        for lower, upper in zip(levels, levels[1:]):
            assert lower < upper
