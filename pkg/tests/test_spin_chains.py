import numpy as np
import pytest

from mposym.errors import ParameterError, ShapeError
from mposym.models.pauli import I2, X, Z
from mposym.models.spin_chains import (
    SpinChainOperator,
    charges,
    czy_unitary,
    equivalence_residuals,
    h2_to_xx,
    hamiltonian,
    levin_gu_to_h2,
    xx,
    z2_residuals,
)


@pytest.mark.parametrize("n_sites", [4, 8])
def test_unitary_equivalences(n_sites, tol):
    residuals = equivalence_residuals(n_sites)
    assert set(residuals) == {"levin_gu_to_h2", "h2_to_xx"}
    assert max(residuals.values()) < tol


def test_h2_to_xx_needs_multiple_of_four():
    assert set(equivalence_residuals(6)) == {"levin_gu_to_h2"}
    with pytest.raises(ParameterError):
        h2_to_xx(6)


@pytest.mark.parametrize("n_sites", [4, 6])
def test_levin_gu_z2_identities(n_sites, tol):
    residuals = z2_residuals(n_sites, tol)
    commutator = residuals.pop("charge_commutator")
    assert max(residuals.values()) < tol
    assert commutator > tol


def test_charges_are_hermitian(tol):
    qs = charges(4, tol)
    assert set(qs) == {"Q_M", "Q_W", "Q~_M", "Q~_W"}
    assert all(q.is_hermitian(tol) for q in qs.values())


def test_czy_squares_to_identity():
    U = czy_unitary(4)
    assert np.abs(U @ U - np.eye(16)).max() < 1e-12


def test_xx_matches_direct_sum():
    ops = []
    for first, second in ((0, 1), (1, 2), (2, 0)):
        for P in (X, Z):
            factors = [I2, I2, I2]
            factors[first] = P
            factors[second] = P
            ops.append(np.kron(np.kron(factors[0], factors[1]), factors[2]))
    assert np.abs(xx(3) - sum(ops)).max() < 1e-12


@pytest.mark.parametrize(
    ("call", "args"),
    [
        (hamiltonian, ("ising", 4)),
        (hamiltonian, ("xx", 2)),
        (hamiltonian, ("xx", 13)),
        (levin_gu_to_h2, (5,)),
        (charges, (3,)),
    ],
)
def test_parameter_errors(call, args):
    with pytest.raises(ParameterError):
        call(*args)


def test_operator_shape_checked():
    with pytest.raises(ShapeError):
        SpinChainOperator(2, np.eye(3))
