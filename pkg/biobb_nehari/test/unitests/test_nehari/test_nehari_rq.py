# type: ignore
import json
import os

import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_nehari.nehari import nehari_rq


class TestNehariRq():
    def setup_class(self):
        fx.test_setup(self, 'quotient')
        self.out_dir = self.properties['path']
        self.config = os.path.join(self.data_dir, 'config', 'config_quotient.yml')

    def teardown_class(self):
        fx.test_teardown(self)
        pass

    def test_quotient_task(self):
        with pytest.raises(SystemExit) as exit_info:
            nehari_rq.main(['quotient', '-c', self.config, '--out', self.out_dir])
        assert exit_info.value.code == 0
        output = os.path.join(self.out_dir, 'quotient.json')
        assert fx.not_empty(output)
        assert not os.path.exists(os.path.join(self.out_dir, 'quotient_profile.csv'))
        with open(output) as fh:
            assert [q['name'] for q in json.load(fh)['quotients']] == ['lambda', 'lambda_e']

    def test_check_output_name(self):
        paths = nehari_rq.output_paths('check', self.out_dir, {'family': 'two-parameter'})
        assert paths == {'output_check_path': os.path.join(self.out_dir, 'check_two-parameter.json')}

    def test_missing_out_folder(self):
        with pytest.raises(SystemExit) as exit_info:
            nehari_rq.main(['quotient', '-c', self.config, '--out', os.path.join(self.out_dir, 'missing')])
        assert exit_info.value.code != 0

    def test_unknown_task(self):
        with pytest.raises(SystemExit) as exit_info:
            nehari_rq.main(['eigen'])
        assert exit_info.value.code == 2
