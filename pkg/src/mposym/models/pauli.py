"""Exact qubit gates and their placement on a chain of N qubits (sites 0..N-1)."""

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(ops) -> np.ndarray:
    return reduce(np.kron, ops, np.eye(1, dtype=complex))


def pauli_string(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"XZI"``."""
    return kron_all(PAULIS[c] for c in label)


def place(op: np.ndarray, sites: list[int], n_sites: int) -> np.ndarray:
    """Embed a k-qubit operator acting on ``sites`` (in that order) into N qubits."""
    k = len(sites)
    if len(set(sites)) != k:
        raise ValueError(f"sites must be distinct, got {sites}")
    full = np.kron(op, np.eye(2 ** (n_sites - k), dtype=complex))
    order = list(sites) + [s for s in range(n_sites) if s not in sites]
    inv = list(np.argsort(order))
    full = full.reshape([2] * (2 * n_sites))
    full = full.transpose(inv + [n_sites + x for x in inv])
    return full.reshape(2**n_sites, 2**n_sites)


def site_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    return place(op, [site], n_sites)


def product(*ops: np.ndarray) -> np.ndarray:
    """Operator product, leftmost factor applied last."""
    return reduce(np.matmul, ops)
