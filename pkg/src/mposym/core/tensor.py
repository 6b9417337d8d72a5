"""Dense tensor arithmetic for matrix product operators.

An MPO tensor is stored as an array ``A[i, j, alpha, beta]`` with physical
output index ``i``, physical input index ``j`` and bond indices ``alpha``,
``beta``. Closed operators are dense matrices.
"""

import logging
from dataclasses import dataclass

import numpy as np

from mposym.config import DEFAULT_CAP
from mposym.errors import ShapeError, SizeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MpoTensor:
    data: np.ndarray
    name: str = ""

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim != 4 or data.shape[2] != data.shape[3]:
            raise ShapeError(f"MPO tensor must have shape (d_out, d_in, D, D), got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def d_out(self) -> int:
        return self.data.shape[0]

    @property
    def d_in(self) -> int:
        return self.data.shape[1]

    @property
    def bond(self) -> int:
        return self.data.shape[2]

    def slice(self, i: int, j: int) -> np.ndarray:
        """The D x D matrix A^{ij}."""
        return self.data[i, j]

    def vertical_slices(self) -> np.ndarray:
        """Physical matrices M_(alpha beta), shape (D, D, d_out, d_in)."""
        return self.data.transpose(2, 3, 0, 1)

    def allclose(self, other: "MpoTensor", tol: float) -> bool:
        return self.data.shape == other.data.shape and bool(
            np.max(np.abs(self.data - other.data), initial=0.0) <= tol
        )

    def scaled(self, factor: complex) -> "MpoTensor":
        return MpoTensor(factor * self.data, self.name)

    @classmethod
    def identity(cls, d: int) -> "MpoTensor":
        """Bond dimension one tensor with A^{ij} = delta_ij."""
        return cls(np.eye(d, dtype=complex).reshape(d, d, 1, 1), name="identity")


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ShapeError(f"operator must be square, got {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise ShapeError(f"cannot multiply operators of dims {self.dim} and {other.dim}")
        return Operator(self.matrix @ other.matrix)

    def is_hermitian(self, tol: float) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def is_positive(self, tol: float) -> bool:
        return self.is_hermitian(tol) and bool(np.min(self.eigenvalues()) >= -tol)

    def eigenvalues(self) -> np.ndarray:
        """Sorted real eigenvalues of the hermitian part."""
        h = (self.matrix + self.matrix.conj().T) / 2
        return np.linalg.eigvalsh(h)

    def allclose(self, other: "Operator", tol: float) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.matrix - other.matrix), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class SparseTensor:
    """Coordinate (index, value) storage of a complex multiway array."""

    shape: tuple[int, ...]
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=int).reshape(-1, len(self.shape))
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if len(indices) != len(values):
            raise ShapeError(f"{len(indices)} indices but {len(values)} values")
        if any(extent <= 0 for extent in self.shape):
            raise ShapeError(f"extents must be positive, got {self.shape}")
        if len(indices) and (indices.min() < 0 or np.any(indices.max(axis=0) >= np.array(self.shape))):
            raise ShapeError("sparse index out of bounds")
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def densify(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=complex)
        # repeated indices accumulate
        np.add.at(dense, tuple(self.indices.T), self.values)
        return dense

    @classmethod
    def sparsify(cls, dense: np.ndarray) -> "SparseTensor":
        dense = np.asarray(dense, dtype=complex)
        indices = np.argwhere(dense != 0)
        return cls(dense.shape, indices, dense[tuple(indices.T)])


def _check_cap(d: int, n: int, cap: int) -> None:
    if d**n > cap:
        raise SizeError(f"physical dimension {d}^{n} = {d**n} exceeds cap {cap}")


def boundary_unit(bond: int, m: int, n: int) -> np.ndarray:
    """Boundary matrix e^{mn} = |n><m| so that closing one site gives (A)_{mn}."""
    e = np.zeros((bond, bond), dtype=complex)
    e[n, m] = 1.0
    return e


def mpo_block(A: MpoTensor, length: int, cap: int = DEFAULT_CAP) -> MpoTensor:
    """Block ``length`` sites horizontally: (A^(l))^{ij} = A^{i1 j1} ... A^{il jl}."""
    if length < 1:
        raise ShapeError(f"blocking length must be >= 1, got {length}")
    _check_cap(max(A.d_out, A.d_in), length, cap)
    blocked = A.data
    for _ in range(length - 1):
        d_out, d_in, D, _ = blocked.shape
        blocked = np.einsum("ijab,klbc->ikjlac", blocked, A.data).reshape(
            d_out * A.d_out, d_in * A.d_in, D, D
        )
    return MpoTensor(blocked, name=f"{A.name}^({length})" if A.name else "")


def mpo_vertical_product(A: MpoTensor, B: MpoTensor) -> MpoTensor:
    """Stack A on top of B: C^{ik}_{(ac)(bd)} = sum_j A^{ij}_{ab} B^{jk}_{cd}."""
    if A.d_in != B.d_out:
        raise ShapeError(f"cannot stack: A.d_in={A.d_in} but B.d_out={B.d_out}")
    stacked = np.einsum("ijab,jkcd->ikacbd", A.data, B.data)
    return MpoTensor(
        stacked.reshape(A.d_out, B.d_in, A.bond * B.bond, A.bond * B.bond),
        name=f"{A.name}*{B.name}" if A.name or B.name else "",
    )


def mpo_close(A: MpoTensor, B: np.ndarray, n_sites: int, cap: int = DEFAULT_CAP) -> Operator:
    """Closed operator O^(N)(B) = sum Tr(A^{i1 j1} ... A^{iN jN} B) |i><j|."""
    B = np.asarray(B, dtype=complex)
    if B.shape != (A.bond, A.bond):
        raise ShapeError(f"boundary must be {A.bond}x{A.bond}, got {B.shape}")
    blocked = mpo_block(A, n_sites, cap)
    return Operator(np.einsum("ijab,ba->ij", blocked.data, B))


def mpdo_contract(M: MpoTensor, n_sites: int, cap: int = DEFAULT_CAP) -> Operator:
    """Unnormalized density operator generated by M on a ring of N sites."""
    if M.d_out != M.d_in:
        raise ShapeError(f"MPDO tensor must be square on the physical legs, got {M.d_out}x{M.d_in}")
    return mpo_close(M, np.eye(M.bond), n_sites, cap)


def physical_direct_sum(tensors: list[MpoTensor], weights: list[complex] | None = None) -> MpoTensor:
    """Direct sum over physical legs of tensors sharing one bond space."""
    if not tensors:
        raise ShapeError("direct sum of no tensors")
    bond = tensors[0].bond
    if any(t.bond != bond for t in tensors):
        raise ShapeError("direct sum requires equal bond dimensions")
    weights = weights if weights is not None else [1.0] * len(tensors)
    d_out = sum(t.d_out for t in tensors)
    d_in = sum(t.d_in for t in tensors)
    out = np.zeros((d_out, d_in, bond, bond), dtype=complex)
    r = c = 0
    for t, w in zip(tensors, weights, strict=True):
        out[r : r + t.d_out, c : c + t.d_in] = w * t.data
        r += t.d_out
        c += t.d_in
    return MpoTensor(out)
