# type: ignore
import json

from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.fiber import fiber


class TestFiber():
    def setup_class(self):
        fx.test_setup(self, 'fiber')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        assert fiber(properties=self.properties, **self.paths) == 0
        assert fx.not_empty(self.paths['output_fiber_path'])
        assert fx.not_empty(self.paths['output_profile_path'])
        with open(self.paths['output_fiber_path']) as fh:
            result = json.load(fh)
        assert result['count'] == 2
        assert [p['sign'] for p in result['critical_points']] == [1, -1]
        for point in result['critical_points']:
            # t^(1/2) - t^(3/2) = lambda on the fiber of a = b_q = c = 1
            t = point['t']
            assert abs(t ** 0.5 - t ** 1.5 - 0.2) < 1e-8
        with open(self.paths['output_profile_path']) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == 't,phi,dphi,ddphi'
        assert len(lines) == 201


class TestFiberFunction():
    def setup_class(self):
        fx.test_setup(self, 'fiber_function')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        fiber(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_fiber_path'])
        with open(self.paths['output_fiber_path']) as fh:
            result = json.load(fh)
        assert result['family'] == 'two-parameter'
        assert result['coefficients']['b_alpha'] > 0
        assert result['count'] == len(result['critical_points'])
