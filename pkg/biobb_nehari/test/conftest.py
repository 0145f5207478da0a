import os

import pytest

# biobb_common's fx.test_setup chdirs into a sandbox that fx.test_teardown
# deletes, leaving later test modules in a non-existent working directory.
_ORIGINAL_CWD = os.getcwd()


@pytest.fixture(autouse=True)
def _restore_deleted_cwd():
    try:
        os.getcwd()
    except FileNotFoundError:
        os.chdir(_ORIGINAL_CWD)
    yield
