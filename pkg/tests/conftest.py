import numpy as np
import pytest

from gpgibbs import build_basis


@pytest.fixture(scope="session")
def basis0():
    return build_basis(0)


@pytest.fixture(scope="session")
def basis1():
    return build_basis(1)


@pytest.fixture(scope="session")
def basis8():
    return build_basis(8)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
