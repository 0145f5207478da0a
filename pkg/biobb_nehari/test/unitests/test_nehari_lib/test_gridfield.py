# type: ignore
from pathlib import Path

import numpy as np
import pytest
from biobb_nehari.nehari_lib import gridfield as gf
from biobb_nehari.nehari_lib.errors import DomainOverflowError, InvalidInputError
from biobb_nehari.nehari_lib.fibering import Exponents3, ProblemParams

HAT_FUNCTION = Path(__file__).resolve().parents[2] / 'data' / 'nehari' / 'hat_function.csv'



class DirichletEnergy():
    family = 'convex-concave'

    def energy_terms(self):
        return 2.0, []

class TestDomain():
    def test_from_dict(self):
        domain = gf.Domain.from_dict({'kind': 'rectangle', 'extent': [1.0, 2.0], 'resolution': [5, 7]})
        assert domain.dimension == 2
        assert domain.interior_shape == (3, 5)
        assert domain.size == 15

    def test_radial_keeps_center(self):
        domain = gf.Domain.radial(10.0, 11, 3)
        assert domain.size == 10
        assert gf.coordinates(domain)[0, 0] == 0.0

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            gf.Domain('torus', (1.0,), (11,))
        with pytest.raises(InvalidInputError):
            gf.Domain.interval(1.0, 2)
        with pytest.raises(InvalidInputError):
            gf.Domain.radial(1.0, 11, 2)
        with pytest.raises(InvalidInputError):
            gf.Domain.interval(-1.0, 11)

    def test_refined(self):
        assert gf.Domain.interval(1.0, 11).refined(3).resolution == (31,)
        with pytest.raises(InvalidInputError):
            gf.Domain.interval(1.0, 11).refined(0)


class TestIntegrals():
    def test_hat_from_file(self):
        u = gf.read_csv(str(HAT_FUNCTION), gf.Domain.interval(1.0, 11))
        assert u.sup_norm() == 1.0
        bundle = gf.integrate(u, (2.0,), 2.0)
        assert bundle.grad_p == pytest.approx(4.0, rel=1e-12)
        assert bundle[2.0] == pytest.approx(np.sum(0.1 * (0.5 * (u.full_values()[1:] + u.full_values()[:-1])) ** 2))

    def test_hat_converges(self):
        errors = []
        for nodes in (11, 41, 161):
            bundle = gf.integrate(gf.hat(gf.Domain.interval(1.0, nodes)), (2.0,), 2.0)
            assert bundle.grad_p == pytest.approx(4.0, rel=1e-12)
            errors.append(abs(bundle[2.0] - 1.0 / 6.0))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-4

    def test_wrong_length(self):
        with pytest.raises(InvalidInputError):
            gf.read_csv(str(HAT_FUNCTION), gf.Domain.interval(1.0, 21))

    def test_csv_text(self):
        u = gf.hat(gf.Domain.interval(1.0, 5))
        lines = gf.to_csv_text(u).splitlines()
        assert lines[0] == 'index,x,value'
        assert lines[2] == '1,0.5,1'

    def test_exponents_above_one(self):
        u = gf.hat(gf.Domain.interval(1.0, 11))
        with pytest.raises(InvalidInputError):
            gf.integrate(u, (1.0,), 2.0)

    def test_gradients(self):
        u = gf.random_positive(gf.Domain.interval(1.0, 21), np.random.default_rng(3))
        grad_p, lebesgue = gf.integral_gradients(u, (3.0,), 2.0)
        h = 1e-6
        for k in (0, 7, 18):
            step = np.zeros(u.values.size)
            step[k] = h
            up = gf.integrate(u.with_values(u.values + step), (3.0,), 2.0)
            down = gf.integrate(u.with_values(u.values - step), (3.0,), 2.0)
            assert grad_p[k] == pytest.approx((up.grad_p - down.grad_p) / (2 * h), rel=1e-5)
            assert lebesgue[3.0][k] == pytest.approx((up[3.0] - down[3.0]) / (2 * h), rel=1e-5)


class TestRadialScaling():
    def test_rescale_identities(self):
        u = gf.random_positive(gf.Domain.radial(5.0, 41, 3), np.random.default_rng(0))
        base = gf.integrate(u, (3.0, 4.0), 2.0)
        moved = gf.integrate(gf.rescale(u, 2.0), (3.0, 4.0), 2.0)
        assert moved.grad_p == pytest.approx(2.0 * base.grad_p, rel=1e-12)
        assert moved[3.0] == pytest.approx(8.0 * base[3.0], rel=1e-12)

    def test_dilate_identities(self):
        u = gf.hat(gf.Domain.radial(4.0, 401, 3), width=2.0)
        base = gf.integrate(u, (2.0,), 2.0)
        for sigma in (0.5, 1.5):
            moved = gf.integrate(gf.dilate(u, sigma), (2.0,), 2.0)
            assert moved.grad_p == pytest.approx(sigma * base.grad_p, rel=1e-3)
            assert moved[2.0] == pytest.approx(sigma ** 3 * base[2.0], rel=1e-3)

    def test_dilate_overflow(self):
        u = gf.random_positive(gf.Domain.radial(5.0, 41, 3), np.random.default_rng(0))
        with pytest.raises(DomainOverflowError):
            gf.dilate(u, 2.0)

    def test_dilate_shrinks(self):
        u = gf.hat(gf.Domain.radial(4.0, 41, 3), width=2.0)
        assert gf.support_radius(gf.dilate(u, 0.5)) < gf.support_radius(u)


class TestEnergy():
    def test_gradient_matches_differences(self):
        problem = ProblemParams('convex-concave', Exponents3(1.5, 2.0, 3.0), 1.0)
        u = gf.eigen_shape(gf.Domain.interval(1.0, 31))
        gradient = gf.energy_gradient(u, problem)
        h = 1e-6
        step = np.zeros(u.values.size)
        step[10] = h
        fd = (gf.energy(u.with_values(u.values + step), problem) - gf.energy(u.with_values(u.values - step), problem)) / (2 * h)
        assert gradient[10] == pytest.approx(fd, rel=1e-5)
        assert gf.residual(u, problem) > 0

    def test_sine_residual(self):
        u = gf.eigen_shape(gf.Domain.interval(1.0, 201))
        assert gf.residual(u, DirichletEnergy()) == pytest.approx(np.pi ** 2, rel=1e-3)

    def test_unknown_family(self):
        with pytest.raises(InvalidInputError):
            gf.energy(gf.hat(gf.Domain.interval(1.0, 11)), object())
