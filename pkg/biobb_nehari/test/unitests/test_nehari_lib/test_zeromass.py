# type: ignore
import numpy as np
import pytest
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib import zeromass as zm
from biobb_nehari.nehari_lib.errors import InvalidInputError, NonexistenceError
from biobb_nehari.nehari_lib.extremal import DescentOptions

PARAMS = zm.ZeroMassParams(3, 4.0, 3.0, 1.0, R=20.0, resolution=101)


def sample(seed=0):
    return gf.random_positive(gf.Domain.radial(PARAMS.R, 81, PARAMS.N), np.random.default_rng(seed))


class TestParams():
    def test_constants(self):
        assert zm.c_N_E(3, 1.0) == pytest.approx(1.0 / 27.0, rel=1e-12)
        assert zm.c_pqNE(PARAMS) == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert zm.c_pqN(PARAMS) == pytest.approx(0.96150, rel=1e-4)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            zm.ZeroMassParams(2, 4.0, 3.0, 1.0)
        with pytest.raises(InvalidInputError):
            zm.ZeroMassParams(3, 3.0, 3.0, 1.0)
        with pytest.raises(InvalidInputError):
            zm.ZeroMassParams(3, 6.0, 3.0, 1.0)
        with pytest.raises(InvalidInputError):
            zm.ZeroMassParams(3, 4.0, 3.0, -1.0)
        with pytest.raises(InvalidInputError, match='E'):
            zm.ZeroMassParams.from_dict({'N': 3, 'p': 4.0, 'q': 3.0})

    def test_existence(self):
        assert PARAMS.existence
        assert not zm.ZeroMassParams(3, 3.0, 4.0, 1.0).existence


class TestQuotients():
    def test_closed_form(self):
        T, A, B = zm.integrals(sample(), PARAMS)
        assert zm.mu_E(T, A, B, PARAMS).value == pytest.approx(zm.mu_E_closed(T, A, B, PARAMS), rel=1e-10)

    def test_realizer_is_minimum(self):
        T, A, B = zm.integrals(sample(1), PARAMS)
        t_star = zm.t_E(T, B, PARAMS)
        best = zm.M_E(t_star ** 2 * T, t_star ** PARAMS.p * A, t_star ** PARAMS.q * B, PARAMS)
        for factor in (0.5, 0.9, 1.1, 2.0):
            t = factor * t_star
            assert zm.M_E(t * t * T, t ** PARAMS.p * A, t ** PARAMS.q * B, PARAMS) > best

    def test_relation(self):
        T, A, B = zm.integrals(sample(2), PARAMS)
        relation = zm.relation_constant(PARAMS)
        expected = relation['constant'] * zm.mu_gn(T, A, B, PARAMS) ** relation['mu_power']
        assert zm.mu_E(T, A, B, PARAMS).value == pytest.approx(expected, rel=1e-10)

    def test_dilation_invariance(self):
        u = sample(3)
        base = zm.integrals(u, PARAMS)
        moved = zm.integrals(gf.rescale(u, 3.0), PARAMS)
        assert zm.mu_gn(*moved, PARAMS) == pytest.approx(zm.mu_gn(*base, PARAMS), rel=1e-10)
        assert zm.mu_E(*moved, PARAMS).value == pytest.approx(zm.mu_E(*base, PARAMS).value, rel=1e-8)

    def test_normalize_pq(self):
        T, A, B = zm.integrals(zm.normalize_pq(sample(4), PARAMS), PARAMS)
        assert A == pytest.approx(1.0, rel=1e-10)
        assert B == pytest.approx(1.0, rel=1e-10)

    def test_no_realizer_for_p_below_q(self):
        params = zm.ZeroMassParams(3, 3.0, 4.0, 1.0)
        T, A, B = zm.integrals(sample(), params)
        with pytest.raises(NonexistenceError):
            zm.t_E(T, B, params)


class TestCertificate():
    def test_issued(self):
        certificate = zm.nonexistence_certificate(zm.ZeroMassParams(3, 3.0, 4.0, 1.0), samples=5)
        assert certificate.issued
        assert certificate.sign_changes == 0
        assert certificate.to_dict()['samples'] == 5

    def test_needs_p_below_q(self):
        with pytest.raises(InvalidInputError):
            zm.nonexistence_certificate(PARAMS, samples=2)


class TestPrescribedEnergy():
    def setup_class(self):
        options = DescentOptions(starts=1, max_iter=3000, tol_grad=1e-9, threads=1)
        self.solution = zm.solve_prescribed_energy(PARAMS, options)

    def test_scaling_checks(self):
        assert self.solution.sigma_check == pytest.approx(1.0, rel=1e-8)
        assert self.solution.t_check == pytest.approx(1.0, rel=1e-8)
        assert self.solution.energy_achieved == pytest.approx(PARAMS.E, rel=1e-8)

    def test_relation_holds(self):
        assert self.solution.mu_hat == pytest.approx(self.solution.mu_hat_closed, rel=1e-8)
        assert self.solution.mu_hat > 0

    def test_critical_point(self):
        assert self.solution.residual < zm.TOL_RESIDUAL
        assert self.solution.converged

    def test_profile(self):
        lines = zm.profile_csv_text(self.solution.u).splitlines()
        assert lines[0] == 'r,value'
        assert len(lines) == PARAMS.resolution
