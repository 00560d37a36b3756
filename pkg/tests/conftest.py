import pytest

from shallowdecode.noise import RngStream


@pytest.fixture
def rng():
    return RngStream(20240611)
