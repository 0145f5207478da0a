# type: ignore
import json
import math
import numpy as np
import pytest
from biobb_nehari.nehari import common
from biobb_nehari.nehari_lib.errors import InvalidInputError
from biobb_nehari.nehari_lib.extremal import DescentOptions


class TestDumps():
    def test_canonical_text(self):
        text = common.dumps({'b': [1, 0.1], 'a': {'y': None, 'x': True}})
        assert text.index('"a"') < text.index('"b"')
        assert '0.10000000000000001' in text
        assert json.loads(text) == {'a': {'x': True, 'y': None}, 'b': [1, 0.1]}

    def test_non_finite_and_numpy(self):
        data = json.loads(common.dumps({'nan': math.nan, 'inf': -math.inf, 'arr': np.array([1.5, 2.0]), 'n': np.int64(3)}))
        assert data == {'nan': None, 'inf': None, 'arr': [1.5, 2.0], 'n': 3}

    def test_write_json_atomic(self, tmp_path):
        path = tmp_path / 'out.json'
        common.write_json_atomic(str(path), {'value': 0.5})
        assert json.loads(path.read_text()) == {'value': 0.5}
        assert [p.name for p in tmp_path.iterdir()] == ['out.json']


class TestGetters():
    def test_family(self):
        assert common.get_family('two-parameter') == 'two-parameter'
        with pytest.raises(InvalidInputError, match='family'):
            common.get_family('quadratic')

    def test_exponents_follow_family(self):
        assert common.get_exponents(None, 'two-parameter').alpha == 1.5
        with pytest.raises(InvalidInputError, match='ordering'):
            common.get_exponents({'q': 1.5, 'p': 2.0, 'gamma': 3.0}, 'two-parameter')

    def test_coefficient_message(self):
        exponents = common.get_exponents(None, 'convex-concave')
        assert common.get_coefficients({'a': 2}, exponents).a == 2.0
        with pytest.raises(InvalidInputError, match='coefficients.c: must be a number'):
            common.get_coefficients({'c': 'x'}, exponents)

    def test_descent_options(self):
        base = DescentOptions(starts=4, max_iter=10)
        options = common.get_descent_options(None, 20, None, 7, base)
        assert (options.starts, options.max_iter, options.seed) == (4, 20, 7)
        with pytest.raises(InvalidInputError, match='max_iter'):
            common.get_descent_options(None, 'many', None, 0)

    def test_grid(self):
        assert common.get_grid({'start': 1, 'stop': 3, 'num': 3}) == [1.0, 2.0, 3.0]
        with pytest.raises(InvalidInputError, match='grid.num'):
            common.get_grid({'start': 1, 'stop': 3})

    def test_domain_refine(self):
        assert common.get_domain(None, 2).resolution == (201,)
        with pytest.raises(InvalidInputError, match='grid_refine'):
            common.get_domain(None, 0)

    def test_number(self):
        assert common.get_number(None, 'mu', required=False) is None
        with pytest.raises(InvalidInputError, match='lambda: required'):
            common.get_number(None, 'lambda')
