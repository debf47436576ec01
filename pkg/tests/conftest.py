import numpy as np
import pytest

from krein_spectra import linalg


@pytest.fixture(params=linalg.available_backends())
def backend(request):
    with linalg.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    return np.random.default_rng(42)
