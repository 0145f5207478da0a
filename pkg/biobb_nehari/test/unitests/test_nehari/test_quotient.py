# type: ignore
import json

import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.quotient import quotient


class TestQuotient():
    def setup_class(self):
        fx.test_setup(self, 'quotient')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        assert quotient(properties=self.properties, **self.paths) == 0
        assert fx.not_empty(self.paths['output_quotient_path'])
        with open(self.paths['output_quotient_path']) as fh:
            result = json.load(fh)
        with open(self.paths['reference_output_quotient_path']) as fh:
            reference = json.load(fh)
        assert result['family'] == reference['family']
        for value, expected in zip(result['quotients'], reference['quotients']):
            assert value['name'] == expected['name']
            assert value['kind'] == expected['kind']
            assert value['value'] == pytest.approx(expected['value'], rel=1e-12)
            assert value['realizer_t'] == pytest.approx(expected['realizer_t'], rel=1e-12)


class TestQuotientTwoParameter():
    def setup_class(self):
        fx.test_setup(self, 'quotient_two_parameter')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        assert quotient(properties=self.properties, **self.paths) == 0
        assert fx.not_empty(self.paths['output_profile_path'])
        with open(self.paths['output_quotient_path']) as fh:
            result = json.load(fh)
        values = {q['name']: q['value'] for q in result['quotients']}
        assert values['lambda_n'] == pytest.approx(0.20096, rel=1e-3)
        assert values['lambda_e4'] == pytest.approx(0.16678, rel=1e-3)
        assert values['mu_n_plus'] == pytest.approx(0.4539, rel=1e-3)
        assert values['mu_n_minus'] == pytest.approx(0.5275, rel=1e-3)
        assert values['mu_n_plus'] < values['mu_e_plus'] < values['mu_e_minus'] < values['mu_n_minus']
        assert result['printed_constants']


class TestQuotientInvalid():
    def setup_class(self):
        fx.test_setup(self, 'quotient')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_mu_quotient_outside_family(self):
        properties = dict(self.properties, quotients=['lambda', 'mu_n'])
        with pytest.raises(SystemExit):
            quotient(properties=properties, **self.paths)

    def test_unordered_exponents(self):
        properties = dict(self.properties, exponents={'q': 2.5, 'p': 2.0, 'gamma': 3.0})
        with pytest.raises(SystemExit):
            quotient(properties=properties, **self.paths)
