"""Compiled-in data of the CZY symmetry: MPO tensors, fusion matrices and representations.

Basis of the algebra: e1..e4 = e_0^{12}, e_0^{13}, e_0^{22}, e_0^{23} and
e5..e8 = e_1^{11}, e_1^{12}, e_1^{21}, e_1^{22} (1-based boundary labels).
"""

from functools import cache

import numpy as np

from mposym.algebra.mpo_algebra import MpoFamily, extract_comultiplication
from mposym.algebra.prebialgebra import PreBialgebra, change_basis, dual, unitize
from mposym.algebra.rep_theory import Representation
from mposym.core.tensor import MpoTensor
from mposym.groups import FiniteGroup
from mposym.models.pauli import I2, X, Z

A1_01 = np.array([[1, 1], [0, 0]], dtype=complex)
A1_10 = np.array([[0, 0], [-1, 1]], dtype=complex)
A0_00 = np.array([[0, -1, 1], [0, 1, -1], [0, 0, 0]], dtype=complex)
A0_11 = np.array([[0, 1, 1], [0, 1, 1], [0, 0, 0]], dtype=complex)

# 0-based (m, n) pairs with a nonzero closed operator
BOUNDARY = {
    0: [(0, 1), (0, 2), (1, 1), (1, 2)],
    1: [(0, 0), (0, 1), (1, 0), (1, 1)],
}

X_11 = np.array(
    [
        [0, 1, 1, 0],
        [0, -1, 1, 0],
        [-1, 0, 0, 1],
        [-1, 0, 0, -1],
    ],
    dtype=complex,
) / np.sqrt(2)

X_01 = np.array(
    [
        [0, 0, 1, 0, 0, -1],
        [0, 0, 0, 1, -1, 0],
        [0, 1, 0, -1, 0, 0],
        [-1, 0, -1, 0, 0, -1],
        [0, -1, 0, 1, -2, 0],
        [-1, 0, -1, 0, 0, 2],
    ],
    dtype=complex,
)

X_10 = np.array(
    [
        [0, 1, 0, 0, 0, 1],
        [0, 0, 1, 0, 1, 0],
        [1, -1, 0, 0, 0, 1],
        [0, 0, 1, -1, -1, 0],
        [1, -1, 0, 0, 0, -2],
        [0, 0, 2, 1, 1, 0],
    ],
    dtype=complex,
)

X_00 = np.array(
    [
        [0, 1, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 2, 0, 0, 0, 2],
        [0, 0, 0, 0, 0, 2, 0, 2, 0],
        [2, 0, 0, 0, -2, 0, 0, 0, -4],
        [0, 0, 2, 0, 0, 0, 0, 0, 0],
        [0, -2, 0, 2, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 2, 0, 0],
        [0, 0, 0, 0, 0, -2, 0, 2, 0],
        [2, 0, 0, 0, -2, 0, 0, 0, 2],
    ],
    dtype=complex,
)

FUSION_HINTS = {(0, 0): X_00, (0, 1): X_01, (1, 0): X_10, (1, 1): X_11}

# rows of X_{a,b} forming Y_{a,b}
FUSION_RANKS = {(0, 0): 3, (0, 1): 2, (1, 0): 2, (1, 1): 3}

H = 0.5
# lam[I, J] as (coefficient, K) pairs, 1-based
MULTIPLICATION_TABLE = [
    [[(1, 3)], [(1, 4)], [(1, 1)], [(1, 2)], [(-1, 5)], [(-1, 6)], [(1, 7)], [(1, 8)]],
    [[(1, 4)], [(1, 3)], [(1, 2)], [(1, 1)], [(1, 6)], [(1, 5)], [(-1, 8)], [(-1, 7)]],
    [[(1, 1)], [(1, 2)], [(1, 3)], [(1, 4)], [(1, 5)], [(1, 6)], [(1, 7)], [(1, 8)]],
    [[(1, 2)], [(1, 1)], [(1, 4)], [(1, 3)], [(-1, 6)], [(-1, 5)], [(-1, 8)], [(-1, 7)]],
    [[(1, 5)], [(1, 6)], [(1, 5)], [(1, 6)], [], [], [(H, 4), (-H, 2)], [(H, 3), (-H, 1)]],
    [[(1, 6)], [(1, 5)], [(1, 6)], [(1, 5)], [], [], [(H, 1), (-H, 3)], [(H, 2), (-H, 4)]],
    [[(-1, 7)], [(-1, 8)], [(1, 7)], [(1, 8)], [(-H, 2), (-H, 4)], [(-H, 1), (-H, 3)], [], []],
    [[(-1, 8)], [(-1, 7)], [(1, 8)], [(1, 7)], [(H, 1), (H, 3)], [(H, 2), (H, 4)], [], []],
]

# f_I = sum_J R[I, J] e_J turns the multiplication into matrix units of M_2 + M_2
BASIS_CHANGE = 0.25 * np.array(
    [
        [-1, 1, 1, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 2, 2, 0, 0],
        [0, 0, 0, 0, 0, 0, -2, 2],
        [1, 1, 1, 1, 0, 0, 0, 0],
        [-1, -1, 1, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, -2, 2, 0, 0],
        [0, 0, 0, 0, 0, 0, -2, -2],
        [1, -1, 1, -1, 0, 0, 0, 0],
    ],
    dtype=complex,
)

# x = e3 + e5 + e8 factorizes as y y*
POSITIVE_ELEMENT = np.array([0, 0, 1, 0, 1, 0, 0, 1], dtype=complex)
POSITIVITY_WITNESS = np.array([-0.5, 0, 0.5, 0, 0, 0, 0, 1], dtype=complex)


def _unit(i: int, j: int, d: int = 2) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def czy_tensors() -> dict[int, MpoTensor]:
    A1 = np.zeros((2, 2, 2, 2), dtype=complex)
    A1[0, 1], A1[1, 0] = A1_01, A1_10
    A0 = np.zeros((2, 2, 3, 3), dtype=complex)
    A0[0, 0], A0[1, 1] = A0_00, A0_11
    return {0: MpoTensor(A0, name="A_0"), 1: MpoTensor(A1, name="A_1")}


def czy_family() -> MpoFamily:
    return MpoFamily(FiniteGroup.cyclic(2), czy_tensors(), BOUNDARY, name="czy")


def czy_fusion_hints() -> dict[tuple[int, int], np.ndarray]:
    return {key: value.copy() for key, value in FUSION_HINTS.items()}


def czy_lambda() -> np.ndarray:
    lam = np.zeros((8, 8, 8), dtype=complex)
    for i, row in enumerate(MULTIPLICATION_TABLE):
        for j, entry in enumerate(row):
            for coeff, k in entry:
                lam[i, j, k - 1] += coeff
    return lam


def czy_star() -> np.ndarray:
    """Columns hold the coordinates of e_I*."""
    S = np.zeros((8, 8), dtype=complex)
    for i in range(4):
        S[i, i] = 1.0
    S[7, 4], S[6, 5], S[5, 6], S[4, 7] = 1.0, -1.0, -1.0, 1.0
    return S


def czy_operators() -> np.ndarray:
    """The two-site operators O^(2)(e_I), used as a faithful *-representation."""
    XX = np.kron(X, X)
    return np.stack(
        [
            -np.kron(Z, I2),
            np.kron(Z, Z),
            np.eye(4),
            -np.kron(I2, Z),
            np.diag([1, -1, 0, 0]) @ XX,
            np.diag([1, 1, 0, 0]) @ XX,
            np.diag([0, 0, -1, -1]) @ XX,
            np.diag([0, 0, -1, 1]) @ XX,
        ]
    ).astype(complex)


@cache
def czy_algebra() -> PreBialgebra:
    """The CZY pre-bialgebra with comultiplication on sector-diagonal boundary pairs."""
    unit = np.zeros(8, dtype=complex)
    unit[2] = 1.0
    return PreBialgebra(
        lam=czy_lambda(),
        delta=extract_comultiplication(czy_family()),
        labels=tuple(f"e{i}" for i in range(1, 9)),
        unit=unit,
        star=czy_star(),
    )


def czy_dual_plus() -> PreBialgebra:
    return unitize(dual(czy_algebra()))


def czy_matrix_units() -> PreBialgebra:
    """The CZY algebra in the basis f_I of BASIS_CHANGE."""
    return change_basis(czy_algebra(), BASIS_CHANGE)


def matrix_unit_constants(blocks: int = 2, n: int = 2) -> np.ndarray:
    """Products E_ij E_kl = delta_jk E_il of a sum of full matrix algebras.

    Basis order is E_11, E_12, ..., E_nn within each block.
    """
    size = n * n
    lam = np.zeros((blocks * size,) * 3, dtype=complex)
    for b in range(blocks):
        for i, j, l in np.ndindex(n, n, n):
            lam[b * size + i * n + j, b * size + j * n + l, b * size + i * n + l] = 1
    return lam


def phi_representations() -> dict[str, Representation]:
    """The two irreducible representations of the CZY algebra."""
    A = czy_algebra()
    one = I2
    E12, E21 = _unit(0, 1), _unit(1, 0)
    phi1 = np.stack([-Z, one, one, -Z, E12, E12, -E21, E21])
    phi2 = np.stack([-Z, -one, one, Z, -E12, E12, -E21, -E21])
    return {
        "phi_1": Representation(A, phi1, name="phi_1"),
        "phi_2": Representation(A, phi2, name="phi_2"),
    }


def psi_representations() -> dict[str, Representation]:
    """Simple and projective indecomposable modules of the unitized dual, simples first.

    Index 0 is the adjoined unit e^0; P_2 is simple and doubles as S_2.
    """
    Ap = czy_dual_plus()

    def rep(d: int, entries: dict[int, np.ndarray], name: str) -> Representation:
        mats = np.zeros((9, d, d), dtype=complex)
        mats[0] = np.eye(d)
        for index, matrix in entries.items():
            mats[index] = matrix
        return Representation(Ap, mats, name=name)

    return {
        "S_0": rep(1, {}, "S_0"),
        "S_1": rep(1, {3: np.ones((1, 1))}, "S_1"),
        "P_2": rep(2, {5: _unit(0, 0), 6: _unit(0, 1), 7: _unit(1, 0), 8: _unit(1, 1)}, "P_2"),
        "P_0": rep(3, {1: _unit(0, 1, 3), 2: _unit(0, 2, 3), 3: _unit(1, 1, 3), 4: _unit(1, 2, 3)}, "P_0"),
        "P_1": rep(2, {1: _unit(0, 1), 3: _unit(1, 1)}, "P_1"),
    }
