import numpy as np
import pytest

from mposym.algebra.prebialgebra import dual
from mposym.models import czy

TOL = 1e-9


@pytest.fixture
def tol() -> float:
    return TOL


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def czy_algebra():
    return czy.czy_algebra()


@pytest.fixture
def czy_dual(czy_algebra):
    return dual(czy_algebra)


@pytest.fixture
def czy_dual_plus():
    return czy.czy_dual_plus()


@pytest.fixture
def catalog():
    """S_0, S_1, P_2, P_0, P_1 over the unitized dual."""
    return list(czy.psi_representations().values())


@pytest.fixture
def psis():
    return czy.psi_representations()


@pytest.fixture
def phis():
    return czy.phi_representations()
