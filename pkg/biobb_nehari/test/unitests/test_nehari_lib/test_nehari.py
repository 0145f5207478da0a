# type: ignore
import math

import pytest
from biobb_nehari.nehari_lib import extremal as ne
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import nehari as nn
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib.errors import InvalidInputError, PreconditionError, ProjectionError
from biobb_nehari.nehari_lib.fibering import Exponents3, Exponents4, FiberCoefficients

THREE = Exponents3(1.5, 2.0, 3.0)
FOUR = Exponents4(1.2, 1.5, 2.0, 3.0)
DOMAIN = gf.Domain.interval(1.0, 31)
OPTIONS = ne.DescentOptions(starts=1, max_iter=3000, tol_grad=1e-10, threads=1)


class TestProjection():
    def test_plus_and_minus(self):
        u = gf.eigen_shape(DOMAIN)
        plus = nn.project_to_nehari(u, 2.0, 'plus', THREE)
        minus = nn.project_to_nehari(u, 2.0, 'minus', THREE)
        assert plus.t < minus.t
        assert not plus.degenerate

    def test_above_lambda_u(self):
        with pytest.raises(ProjectionError):
            nn.project_to_nehari(gf.eigen_shape(DOMAIN), 100.0, 'plus', THREE)

    def test_zero_function(self):
        u = gf.DiscreteFunction(DOMAIN, [0.0] * DOMAIN.size)
        with pytest.raises(InvalidInputError):
            nn.project_to_nehari(u, 2.0, 'plus', THREE)


class TestSolveM():
    def setup_class(self):
        self.plus = nn.solve_M(2.0, 'plus', DOMAIN, THREE, OPTIONS)

    def test_plus_on_manifold(self):
        coeffs, value = nn._fiber_state(self.plus.u, self.plus.problem)
        assert abs(value.dphi) <= 1e-8 * (coeffs.a + 2.0 * coeffs.b_q + coeffs.c)
        assert value.ddphi > 0
        assert self.plus.energy < 0
        assert self.plus.admissible

    def test_verify(self):
        report = nn.verify(self.plus)
        names = [name for name, _, _ in report.checks]
        assert names == ['nonzero', 'membership', 'residual', 'phi2_sign', 'admissible']
        assert report.passed
        assert report.failed() == []
        assert report.to_dict()['passed']
        assert self.plus.residual < nn.TOL_RES
        assert self.plus.converged

    def test_minus_above_plus(self):
        minus = nn.solve_M(2.0, 'minus', DOMAIN, THREE, OPTIONS)
        assert minus.energy > self.plus.energy
        assert minus.phi2 < 0
        assert minus.residual < nn.TOL_RES
        # two distinct solutions, well apart in energy
        assert minus.energy - self.plus.energy > 10 * nn.TOL_RES * max(abs(minus.energy), abs(self.plus.energy), 1.0)
        assert nn.verify(minus).passed

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            nn.solve_M(2.0, 'rn1', DOMAIN, THREE, OPTIONS)
        with pytest.raises(InvalidInputError):
            nn.solve_M(-1.0, 'plus', DOMAIN, THREE, OPTIONS)
        with pytest.raises(InvalidInputError):
            nn.solve_M(2.0, 'plus', DOMAIN, FOUR, OPTIONS)


class TestThreeTerm():
    def test_window(self):
        window = {'lambda_bound': 1.0, 'mu_low': 0.5, 'mu_high': 0.6}
        with pytest.raises(PreconditionError):
            nn.solve_three_term(0.1, 0.7, 'rn1', DOMAIN, FOUR, OPTIONS, window)
        with pytest.raises(PreconditionError):
            nn.solve_three_term(2.0, 0.55, 'rn1', DOMAIN, FOUR, OPTIONS, window)

    def test_rn1_rising_point(self):
        coeffs = FiberCoefficients.from_function(gf.eigen_shape(DOMAIN), FOUR)
        plus, minus = nq.mu_pm_quotients(coeffs, 0.1, 'n')
        mu = 0.5 * (plus.value + minus.value)
        window = {'lambda_bound': math.inf, 'mu_low': -math.inf, 'mu_high': math.inf}
        solution = nn.solve_three_term(0.1, mu, 'rn1', DOMAIN, FOUR, OPTIONS, window)
        _, value = nn._fiber_state(solution.u, solution.problem)
        assert value.ddphi > 0
        assert solution.mu == mu


class TestMuWindow():
    def setup_class(self):
        coeffs = FiberCoefficients.from_function(gf.eigen_shape(DOMAIN), FOUR)
        self.lam = 0.5 * nq.lambda_e_quotient(coeffs).value
        e_minus = nq.mu_pm_quotients(coeffs, self.lam, 'e')[1].value
        n_minus = nq.mu_pm_quotients(coeffs, self.lam, 'n')[1].value
        self.mu = 0.5 * (e_minus + n_minus)
        window = {'lambda_bound': math.inf, 'mu_low': -math.inf, 'mu_high': math.inf}
        self.rn1 = nn.solve_three_term(self.lam, self.mu, 'rn1', DOMAIN, FOUR, OPTIONS, window)
        self.rn2 = nn.solve_three_term(self.lam, self.mu, 'rn2', DOMAIN, FOUR, OPTIONS, window)

    def test_rn2_falling_point(self):
        assert self.rn2.phi2 < 0
        assert self.rn2.energy < 0
        assert self.rn2.mu == self.mu

    def test_rn1_below_rn2(self):
        assert self.rn1.phi2 > 0
        assert self.rn1.energy < 0
        assert self.rn1.energy <= self.rn2.energy + 1e-8 * abs(self.rn2.energy)


class TestContinuation():
    def test_sweep(self):
        diagram = nn.continue_branch([1.0, 2.0], 'plus', DOMAIN, THREE, OPTIONS)
        assert [row.status for row in diagram.rows] == ['ok', 'ok']
        assert diagram.rows[1].energy < diagram.rows[0].energy
        assert diagram.limit_numeric == 2.0
        lines = diagram.to_csv_text().splitlines()
        assert lines[0] == nn.BRANCH_CSV_HEADER
        assert lines[1].split(',')[5] == 'true'

    def test_failure_is_bracketed(self):
        diagram = nn.continue_branch([1.0, 1000.0, 2000.0], 'plus', DOMAIN, THREE, OPTIONS, bisect_steps=3)
        assert [row.status for row in diagram.rows] == ['ok', 'failed', 'past-failure']
        good, bad = diagram.bracket
        assert 1.0 <= good < bad <= 1000.0
        assert diagram.to_dict()['admissible_rows'] == 1

    def test_limit_not_below_lambda_star(self):
        lam_star = ne.lambda_star(DOMAIN, THREE, OPTIONS).value
        diagram = nn.continue_branch([0.5 * lam_star, lam_star], 'plus', DOMAIN, THREE, OPTIONS)
        assert diagram.rows[0].admissible
        assert diagram.limit_numeric >= lam_star

    def test_grid_must_increase(self):
        with pytest.raises(InvalidInputError):
            nn.continue_branch([2.0, 1.0], 'plus', DOMAIN, THREE, OPTIONS)

    def test_mu_sweep_needs_lambda(self):
        with pytest.raises(InvalidInputError):
            nn.continue_branch([1.0], 'rn1', DOMAIN, FOUR, OPTIONS)
