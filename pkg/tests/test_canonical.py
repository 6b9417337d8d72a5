import numpy as np
import pytest

from mposym.core.tensor import MpoTensor, physical_direct_sum
from mposym.errors import ShapeError
from mposym.models.pauli import I2, X, Z
from mposym.pipelines import czy_rfp
from mposym.rfp.canonical import chi_spread, is_normal, transfer_radius, verify_rfp, vertical_canonical_form


def pauli_tensor() -> MpoTensor:
    """Physical matrices X, Z, I on bond pairs (0,0), (0,1), (1,0)."""
    data = np.zeros((2, 2, 2, 2), dtype=complex)
    data[:, :, 0, 0] = X
    data[:, :, 0, 1] = Z
    data[:, :, 1, 0] = I2
    return MpoTensor(data, name="pauli")


def test_normality():
    assert is_normal(pauli_tensor().data)
    diagonal = np.zeros((2, 2, 1, 1), dtype=complex)
    diagonal[:, :, 0, 0] = Z
    assert not is_normal(diagonal)


def test_transfer_radius_scales_quadratically():
    T = pauli_tensor()
    assert transfer_radius(3 * T.data) == pytest.approx(9 * transfer_radius(T.data))


def test_weighted_copies_merge_into_one_block(tol):
    T = pauli_tensor()
    M = physical_direct_sum([T, T], [0.3, 0.7])
    cf = vertical_canonical_form(M, tol)
    assert len(cf.blocks) == 1
    mu = np.sort(cf.blocks[0].mu.real)
    assert mu[1] / mu[0] == pytest.approx(7 / 3)
    assert cf.residual < 1e-8


def test_rectangular_tensor_rejected():
    with pytest.raises(ShapeError):
        vertical_canonical_form(MpoTensor(np.zeros((2, 3, 1, 1))))


@pytest.fixture(scope="module")
def czy_outcome():
    return czy_rfp(sizes=(2,))


def test_czy_fixed_point_canonical_form(czy_outcome, tol):
    outcome = czy_outcome
    cf = outcome.canonical
    assert len(cf.blocks) == 2
    assert sorted(b.tensor.d_out for b in cf.blocks) == [2, 2]
    assert cf.residual < tol
    assert outcome.report.is_rfp
    assert (outcome.report.multiplicities(2) == 1).all()
    for W in outcome.report.isometries.values():
        assert np.abs(W @ W.conj().T - np.eye(len(W))).max() < 1e-10
    for chi in outcome.report.chi.values():
        assert (chi > 0).all()
    assert outcome.report.residuals["chi_scalar"] <= tol


def test_irreducible_pair_is_not_a_fixed_point(tol):
    report = verify_rfp(vertical_canonical_form(pauli_tensor(), tol), tol)
    assert report.unidentified == [(0, 0)]
    assert not report.is_rfp


def test_chi_spread():
    assert chi_spread({}) == 0.0
    assert chi_spread({(0, 0, 0): np.array([2.0, 2.0]), (0, 0, 1): np.array([0.5])}) == 0.0
    assert chi_spread({(0, 0, 0): np.array([1.0, 1.5]), (1, 0, 1): np.array([3.0])}) == pytest.approx(0.25)


def test_perturbed_fixed_point_is_rejected(czy_outcome, rng, tol):
    M = czy_outcome.construction.tensor
    noisy = MpoTensor(M.data + 1e-2 * rng.normal(size=M.data.shape))
    report = verify_rfp(vertical_canonical_form(noisy, tol), tol)
    assert not report.is_rfp
