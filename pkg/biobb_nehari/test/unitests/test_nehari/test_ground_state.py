# type: ignore
import json

import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.ground_state import ground_state


class TestGroundState():
    def setup_class(self):
        fx.test_setup(self, 'ground_state')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        ground_state(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_solution_path'])
        with open(self.paths['output_solution_path']) as fh:
            result = json.load(fh)
        assert result['branch'] == 'plus'
        assert 'verification' in result
        assert result['energy'] < 0
        assert fx.not_empty(self.paths['output_function_path'])

    def test_unknown_branch(self):
        properties = dict(self.properties, branch='middle')
        with pytest.raises(SystemExit):
            ground_state(properties=properties, **self.paths)
