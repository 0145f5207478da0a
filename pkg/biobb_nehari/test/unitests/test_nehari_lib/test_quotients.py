# type: ignore
import math

import numpy as np
import pytest
from biobb_nehari.nehari_lib import quotients as nq
from biobb_nehari.nehari_lib.errors import DegenerateError, InvalidInputError, NoRootsError
from biobb_nehari.nehari_lib.fibering import Exponents3, Exponents4, FiberCoefficients

THREE = Exponents3(1.5, 2.0, 3.0)
FOUR = Exponents4(1.2, 1.5, 2.0, 3.0)


class TestConvexConcave():
    unit = FiberCoefficients(1.0, 1.0, 1.0, THREE)

    def test_worked_example(self):
        assert nq.s_max(self.unit) == pytest.approx(1.0 / 3.0, rel=1e-12)
        value = nq.lambda_u(self.unit)
        assert value.value == pytest.approx(2.0 / (3.0 * math.sqrt(3.0)), rel=1e-12)
        assert value.t == pytest.approx(1.0 / 3.0)
        assert nq.s_e_max(self.unit) == pytest.approx(0.5, rel=1e-12)
        assert nq.lambda_e_u(self.unit).value == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), rel=1e-12)

    def test_closed_form_is_maximum(self):
        coeffs = FiberCoefficients(2.0, 0.7, 3.1, THREE)
        grid = np.geomspace(1e-3, 1e2, 5000)
        best = max(nq.rn_3term(coeffs, float(t)) for t in grid)
        assert best <= nq.lambda_u(coeffs).value * (1 + 1e-12)
        assert best == pytest.approx(nq.lambda_u(coeffs).value, rel=1e-5)

    def test_energy_quotient_below(self):
        coeffs = FiberCoefficients(0.3, 4.0, 1.7, THREE)
        assert nq.lambda_e_u(coeffs).value < nq.lambda_u(coeffs).value

    def test_homogeneous(self):
        coeffs = FiberCoefficients(2.0, 0.7, 3.1, THREE)
        for t in (0.5, 2.0, 10.0):
            assert nq.lambda_u(coeffs.scaled(t)).value == pytest.approx(nq.lambda_u(coeffs).value, rel=1e-12)

    def test_printed_constant(self):
        constants = nq.printed_constants(THREE)
        assert constants['name'] == 'c_pq'
        assert constants['computed'] == pytest.approx(0.91856, rel=1e-4)
        assert constants['printed'] != pytest.approx(constants['computed'], rel=1e-2)

    def test_family_mismatch(self):
        with pytest.raises(InvalidInputError):
            nq.lambda_n_quotient(self.unit)


class TestTwoParameter():
    unit = FiberCoefficients(1.0, 1.0, 1.0, FOUR, 1.0)

    def test_constants(self):
        assert nq.C_n(FOUR) == pytest.approx(4.0 / 27.0, rel=1e-12)
        assert nq.C_e(FOUR) == pytest.approx(2.0 / 9.0, rel=1e-12)

    def test_worked_example(self):
        assert nq.lambda_n_quotient(self.unit).value == pytest.approx(0.20096, rel=1e-4)
        assert nq.lambda_e_quotient(self.unit).value == pytest.approx(0.16678, rel=1e-4)
        plus, minus = nq.mu_pm_quotients(self.unit, 0.1, 'n')
        assert plus.value == pytest.approx(0.4539, rel=1e-3)
        assert minus.value == pytest.approx(0.5275, rel=1e-3)
        assert plus.t == pytest.approx(0.03403, rel=1e-3)
        assert minus.t == pytest.approx(0.2776, rel=1e-3)

    def test_roots_solve_level(self):
        for flavor, big_lambda in (('n', nq.Lambda_n), ('e', nq.Lambda_e)):
            for value in nq.mu_pm_quotients(self.unit, 0.1, flavor):
                assert big_lambda(self.unit, value.t) == pytest.approx(0.1, rel=1e-10)

    def test_chain(self):
        n_plus, n_minus = nq.mu_pm_quotients(self.unit, 0.1, 'n')
        e_plus, e_minus = nq.mu_pm_quotients(self.unit, 0.1, 'e')
        assert n_plus.value < e_plus.value < e_minus.value < n_minus.value
        assert n_plus.t < e_plus.t < nq.t_e(self.unit) < n_minus.t < e_minus.t

    def test_level_above_peak(self):
        with pytest.raises(NoRootsError):
            nq.mu_pm_quotients(self.unit, 0.3, 'n')
        with pytest.raises(NoRootsError):
            nq.mu_pm_quotients(self.unit, 0.18, 'e')

    def test_level_at_peak(self):
        with pytest.raises(DegenerateError):
            nq.mu_pm_quotients(self.unit, nq.lambda_n_quotient(self.unit).value, 'n')

    def test_unknown_flavor(self):
        with pytest.raises(InvalidInputError):
            nq.mu_pm_quotients(self.unit, 0.1, 'x')


class TestProfile():
    def test_rows(self):
        rows = nq.profile(FiberCoefficients(1.0, 1.0, 1.0, THREE), 'rn', [0.1, 1.0 / 3.0, 1.0])
        assert rows.shape == (3, 2)
        assert rows[1, 1] == pytest.approx(2.0 / (3.0 * math.sqrt(3.0)))
        assert rows[2, 1] == pytest.approx(0.0)

    def test_lambda_required(self):
        with pytest.raises(InvalidInputError):
            nq.profile(FiberCoefficients(1.0, 1.0, 1.0, FOUR, 1.0), 'rn_lambda', [1.0])

    def test_unknown_profile(self):
        with pytest.raises(InvalidInputError):
            nq.profile(FiberCoefficients(1.0, 1.0, 1.0, THREE), 'eigen', [1.0])
