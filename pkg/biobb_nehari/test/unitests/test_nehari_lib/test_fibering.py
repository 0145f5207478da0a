# type: ignore
import numpy as np
import pytest
from biobb_nehari.nehari_lib import fibering
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib.errors import InvalidInputError
from biobb_nehari.nehari_lib.fibering import (
    Exponents3,
    Exponents4,
    FiberCoefficients,
    FiberOptions,
    critical_points,
    critical_points_4term,
    parse_exponents,
    phi_fiber,
    sign_changes,
)


class TestExponents():
    def test_parse_three_terms(self):
        assert parse_exponents({'q': 1.5, 'p': 2, 'gamma': 3}) == Exponents3(1.5, 2.0, 3.0)

    def test_parse_four_terms(self):
        assert parse_exponents({'q': 1.2, 'alpha': 1.5, 'p': 2, 'gamma': 3}) == Exponents4(1.2, 1.5, 2.0, 3.0)

    def test_ordering(self):
        with pytest.raises(InvalidInputError):
            Exponents3(2.5, 2.0, 3.0)
        with pytest.raises(InvalidInputError):
            Exponents4(1.2, 2.5, 2.0, 3.0)
        with pytest.raises(InvalidInputError):
            Exponents3(0.5, 2.0, 3.0)

    def test_missing_entry(self):
        with pytest.raises(InvalidInputError, match='gamma'):
            parse_exponents({'q': 1.5, 'p': 2})

    def test_subcritical(self):
        with pytest.raises(InvalidInputError):
            Exponents3(1.5, 2.0, 7.0).check_dimension(3)
        Exponents3(1.5, 2.0, 5.0).check_dimension(3)


class TestFiberCoefficients():
    def test_positive(self):
        with pytest.raises(InvalidInputError):
            FiberCoefficients(0.0, 1.0, 1.0, Exponents3(1.5, 2.0, 3.0))

    def test_b_alpha_matches_family(self):
        with pytest.raises(InvalidInputError):
            FiberCoefficients(1.0, 1.0, 1.0, Exponents4(1.2, 1.5, 2.0, 3.0))
        with pytest.raises(InvalidInputError):
            FiberCoefficients(1.0, 1.0, 1.0, Exponents3(1.5, 2.0, 3.0), 1.0)

    def test_scaled(self):
        coeffs = FiberCoefficients(1.0, 2.0, 3.0, Exponents3(1.5, 2.0, 3.0)).scaled(2.0)
        assert (coeffs.a, coeffs.b_q, coeffs.c) == pytest.approx((4.0, 2.0 * 2.0 ** 1.5, 24.0))


class TestCriticalPoints():
    unit = FiberCoefficients(1.0, 1.0, 1.0, Exponents3(1.5, 2.0, 3.0))
    four = FiberCoefficients(1.0, 1.0, 1.0, Exponents4(1.2, 1.5, 2.0, 3.0), 1.0)

    def test_below_lambda_u(self):
        points = critical_points(self.unit, 0.2)
        assert len(points) == 2
        assert points.signs == [1, -1]
        assert points.ts[0] < nq.s_max(self.unit) < points.ts[1]
        for t in points.ts:
            assert abs(phi_fiber(self.unit, 0.2, None, t).dphi) < 1e-10

    def test_above_lambda_u(self):
        assert len(critical_points(self.unit, 0.5)) == 0

    def test_at_lambda_u(self):
        lam = nq.lambda_u(self.unit).value
        points = critical_points(self.unit, lam)
        assert len(points) == 1
        assert points.degenerate
        assert points.ts[0] == pytest.approx(1.0 / 3.0, rel=1e-4)

    def test_negative_lambda(self):
        points = critical_points(self.unit, -0.2)
        assert len(points) == 1
        assert points.signs == [-1]

    def test_mu_rejected_for_three_terms(self):
        with pytest.raises(InvalidInputError):
            critical_points(self.unit, 0.2, 1.0)

    def test_four_terms_bounded(self):
        points = critical_points(self.four, 0.1, 0.5)
        assert len(points) <= 3
        assert points.ts == sorted(points.ts)

    def test_four_terms_three_points(self):
        mu_plus, mu_minus = nq.mu_pm_quotients(self.four, 0.1, 'n')
        mu = 0.5 * (mu_plus.value + mu_minus.value)
        points = critical_points_4term(self.four, 0.1, mu)
        assert len(points) == 3
        assert points.signs == [-1, 1, -1]
        for t in points.ts:
            assert abs(phi_fiber(self.four, 0.1, mu, t).dphi) < 1e-10

    def test_four_terms_single_point(self):
        points = critical_points_4term(self.four, 0.1, 10.0)
        assert len(points) == 1
        assert points.signs == [-1]
        assert points.ts[0] < 1e-4

    def test_four_terms_match_sign_scan(self):
        grid = np.geomspace(1e-7, 1e4, 20001)
        for mu in (0.3, 0.45, 0.5, 0.52, 0.6, 2.0):
            expected = sign_changes(lambda t: phi_fiber(self.four, 0.1, mu, t).dphi, grid)
            assert len(critical_points_4term(self.four, 0.1, mu)) == expected

    def test_root_next_to_flat_turning_point(self):
        # (t - 1)^3 + eta: flat inflection at t = 1, simple root just below it
        eta = 5e-10
        poly = fibering._GenPoly([-1.0 + eta, 3.0, -3.0, 1.0], [0.0, 1.0, 2.0, 3.0])
        roots = fibering._positive_roots(poly, FiberOptions(), np.geomspace(1e-4, 1e3, 513), [])
        assert [t for t, degenerate in roots if degenerate] == [pytest.approx(1.0, abs=1e-6)]
        simple = [t for t, degenerate in roots if not degenerate]
        assert simple == [pytest.approx(1.0 - eta ** (1.0 / 3.0), rel=1e-6)]

    def test_phi_needs_positive_t(self):
        with pytest.raises(InvalidInputError):
            phi_fiber(self.unit, 0.2, None, 0.0)
