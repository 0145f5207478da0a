# type: ignore
import json
import math

from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.extremal import extremal


class TestExtremalRayleigh():
    def setup_class(self):
        fx.test_setup(self, 'extremal')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        assert extremal(properties=self.properties, **self.paths) == 0
        assert fx.not_empty(self.paths['output_extremal_path'])
        assert fx.not_empty(self.paths['output_minimizer_path'])
        with open(self.paths['output_extremal_path']) as fh:
            result = json.load(fh)
        assert abs(result['value'] - math.pi ** 2) / math.pi ** 2 < 1e-2
        with open(self.paths['output_minimizer_path']) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == 'index,x,value'
        assert len(lines) == 60


class TestExtremalLambdaStar():
    def setup_class(self):
        fx.test_setup(self, 'extremal_lambda_star')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        extremal(properties=self.properties, **self.paths)
        with open(self.paths['output_extremal_path']) as fh:
            result = json.load(fh)
        assert result['target'] == 'lambda_star'
        assert result['family'] == 'convex-concave'
        assert result['value'] > 0
