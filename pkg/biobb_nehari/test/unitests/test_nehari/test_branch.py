# type: ignore
import json

import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari.branch import branch


class TestBranch():
    def setup_class(self):
        fx.test_setup(self, 'branch')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_launch(self):
        branch(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_branch_path'])
        assert fx.not_empty(self.paths['output_summary_path'])
        with open(self.paths['output_branch_path']) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == 'lambda,mu,energy,norm_gamma,residual,admissible,phi2'
        with open(self.paths['output_summary_path']) as fh:
            summary = json.load(fh)
        assert summary['values'] == [1.0, 3.0, 5.0]
        assert summary['rows'] == len(lines) - 1
        assert len(summary['status']) == summary['rows']

    def test_bisect_steps_not_integer(self):
        for steps in ('many', 2.5, -1):
            properties = dict(self.properties, bisect_steps=steps)
            with pytest.raises(SystemExit) as exit_info:
                branch(properties=properties, **self.paths)
            assert 'bisect_steps' in str(exit_info.value.code)
