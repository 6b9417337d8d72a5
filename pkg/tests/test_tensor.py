import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.core.tensor import (
    MpoTensor,
    Operator,
    SparseTensor,
    boundary_unit,
    mpdo_contract,
    mpo_block,
    mpo_close,
    mpo_vertical_product,
    physical_direct_sum,
)
from mposym.errors import ShapeError, SizeError


def random_tensor(rng, d=2, D=2):
    return MpoTensor(rng.normal(size=(d, d, D, D)) + 1j * rng.normal(size=(d, d, D, D)))


def test_tensor_rejects_non_square_bond():
    with pytest.raises(ShapeError):
        MpoTensor(np.zeros((2, 2, 2, 3)))


def test_tensor_data_is_read_only(rng):
    A = random_tensor(rng)
    with pytest.raises(ValueError):
        A.data[0, 0, 0, 0] = 1.0


def test_identity_closes_to_identity():
    op = mpo_close(MpoTensor.identity(2), np.eye(1), 3)
    assert_allclose(op.matrix, np.eye(8))


@pytest.mark.parametrize(("m", "n"), [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_boundary_unit_picks_bond_entry(rng, m, n):
    A = random_tensor(rng)
    op = mpo_close(A, boundary_unit(A.bond, m, n), 1)
    assert_allclose(op.matrix, A.data[:, :, m, n])


def test_vertical_product_closes_to_operator_product(rng):
    A, B = random_tensor(rng), random_tensor(rng, D=3)
    BA, BB = rng.normal(size=(2, 2)), rng.normal(size=(3, 3))
    stacked = mpo_vertical_product(A, B)
    assert stacked.bond == 6
    for n_sites in (1, 2, 3):
        expected = mpo_close(A, BA, n_sites).matrix @ mpo_close(B, BB, n_sites).matrix
        assert_allclose(mpo_close(stacked, np.kron(BA, BB), n_sites).matrix, expected, atol=1e-10)


def test_block_respects_cap(rng):
    with pytest.raises(SizeError):
        mpo_block(random_tensor(rng), 5, cap=16)


def test_mpdo_contract_needs_square_legs():
    with pytest.raises(ShapeError):
        mpdo_contract(MpoTensor(np.zeros((2, 3, 1, 1))), 2)


def test_direct_sum_places_weighted_blocks(rng):
    A, B = random_tensor(rng, d=2), random_tensor(rng, d=3)
    M = physical_direct_sum([A, B], [0.5, 2.0])
    assert (M.d_out, M.bond) == (5, 2)
    assert_allclose(M.data[:2, :2], 0.5 * A.data)
    assert_allclose(M.data[2:, 2:], 2.0 * B.data)
    assert np.all(M.data[:2, 2:] == 0)


def test_direct_sum_needs_common_bond(rng):
    with pytest.raises(ShapeError):
        physical_direct_sum([random_tensor(rng, D=2), random_tensor(rng, D=3)])


def test_sparse_tensor_accumulates_repeats():
    T = SparseTensor((2, 2), [[0, 1], [0, 1], [1, 0]], [1.0, 2.0, 1j])
    assert T.nnz == 3
    assert_allclose(T.densify(), [[0, 3], [1j, 0]])
    assert SparseTensor.sparsify(T.densify()).nnz == 2


def test_sparse_tensor_bounds():
    with pytest.raises(ShapeError):
        SparseTensor((2, 2), [[2, 0]], [1.0])


def test_operator_positivity():
    rho = Operator(np.diag([0.5, 0.5, 0.0, 0.0]))
    assert rho.is_positive(1e-12)
    assert not Operator(np.diag([1.0, -1.0])).is_positive(1e-12)
    with pytest.raises(ShapeError):
        rho @ Operator(np.eye(2))


def test_blocking_composes(rng):
    A = random_tensor(rng)
    assert mpo_block(mpo_block(A, 2), 2).allclose(mpo_block(A, 4), 1e-9)


@pytest.mark.parametrize(("length", "n_sites"), [(2, 2), (3, 1), (2, 3)])
def test_closing_a_blocked_tensor(rng, length, n_sites):
    A = random_tensor(rng)
    B = rng.normal(size=(2, 2))
    blocked = mpo_close(mpo_block(A, length), B, n_sites).matrix
    assert_allclose(blocked, mpo_close(A, B, length * n_sites).matrix, atol=1e-10)


def test_trace_closure_is_translation_invariant(rng):
    n = 3
    A = random_tensor(rng)
    rho = mpo_close(A, np.eye(2), n).matrix.reshape((2,) * (2 * n))
    # cyclic shift of the sites, applied to kets and bras alike
    shifted = np.moveaxis(rho, [0, n], [n - 1, 2 * n - 1])
    assert_allclose(shifted, rho, atol=1e-10)
    B = np.diag([1.0, -1.0])
    twisted = mpo_close(A, B, n).matrix.reshape((2,) * (2 * n))
    assert not np.allclose(np.moveaxis(twisted, [0, n], [n - 1, 2 * n - 1]), twisted)
