# stdlib imports
import os
import sys

# third party imports
import pytest

# local imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from gstn.quadratic import build_form  # noqa: E402
from gstn.spectral import eigendecompose  # noqa: E402

_SPECTRA = {}


@pytest.fixture(scope='session')
def spectrum_for():
    """Cached (form, spectrum) for a player count."""
    def get(n):
        if n not in _SPECTRA:
            form = build_form(n)
            _SPECTRA[n] = (form, eigendecompose(form))
        return _SPECTRA[n]
    return get


def pytest_configure(config):
    config.addinivalue_line('markers',
            'slow: full-size sampling runs, deselect with -m "not slow"')
