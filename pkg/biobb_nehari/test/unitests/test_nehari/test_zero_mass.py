# type: ignore
import json

from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.zero_mass import zero_mass


class TestZeroMass():
    def setup_class(self):
        fx.test_setup(self, 'zero_mass')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        zero_mass(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_zero_mass_path'])
        with open(self.paths['output_zero_mass_path']) as fh:
            result = json.load(fh)
        assert result['existence'] is True
        assert result['mu_hat'] > 0
        assert result['E'] == 1.0
        with open(self.paths['output_profile_path']) as fh:
            assert fh.readline().strip() == 'r,value'


class TestZeroMassNonexistence():
    def setup_class(self):
        fx.test_setup(self, 'zero_mass_nonexistence')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        assert zero_mass(properties=self.properties, **self.paths) == 0
        with open(self.paths['output_zero_mass_path']) as fh:
            result = json.load(fh)
        assert result['existence'] is False
        assert result['certificate']['issued'] is True
        assert 'refused' in result
