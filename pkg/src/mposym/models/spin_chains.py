"""Levin-Gu, H_2 and XX chains on N qubits with periodic boundary conditions.

Sites are 0-based here. The circuits pairing (2i, 2i+1) in 1-based labels act
on 0-based sites (2i-1, 2i mod N).
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from mposym.config import DEFAULT_TOL
from mposym.errors import ModelError, ParameterError, ShapeError
from mposym.models.pauli import CZ, HADAMARD, I2, PAULIS, X, Y, Z, kron_all, place, site_op

logger = logging.getLogger(__name__)

MODELS = ("levin_gu", "h2", "xx")
MAX_SITES = 12


@dataclass(frozen=True, eq=False)
class SpinChainOperator:
    n_sites: int
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2**self.n_sites, 2**self.n_sites):
            raise ShapeError(f"{self.label}: expected a {2**self.n_sites}-dimensional operator, got {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= tol)

    def conjugate_by(self, U: np.ndarray) -> np.ndarray:
        """U^dagger O U."""
        return U.conj().T @ self.matrix @ U


def _check_sites(n_sites: int, minimum: int = 3, multiple: int = 1) -> None:
    if n_sites < minimum or n_sites > MAX_SITES:
        raise ParameterError(f"number of sites must lie in {minimum}..{MAX_SITES}, got {n_sites}")
    if n_sites % multiple:
        raise ParameterError(f"number of sites must be a multiple of {multiple}, got {n_sites}")


def _bond_sum(first: np.ndarray, second: np.ndarray, n_sites: int) -> np.ndarray:
    op = np.kron(first, second)
    return sum(place(op, [i, (i + 1) % n_sites], n_sites) for i in range(n_sites))


def levin_gu(n_sites: int) -> np.ndarray:
    """sum_i X_i - Z_{i-1} X_i Z_{i+1}."""
    zxz = kron_all([Z, X, Z])
    return sum(
        site_op(X, i, n_sites) - place(zxz, [(i - 1) % n_sites, i, (i + 1) % n_sites], n_sites)
        for i in range(n_sites)
    )


def h2(n_sites: int) -> np.ndarray:
    """sum_i X_i Z_{i+1} - Z_i X_{i+1}."""
    return _bond_sum(X, Z, n_sites) - _bond_sum(Z, X, n_sites)


def xx(n_sites: int) -> np.ndarray:
    """sum_i X_i X_{i+1} + Z_i Z_{i+1}."""
    return _bond_sum(X, X, n_sites) + _bond_sum(Z, Z, n_sites)


_BUILDERS = {"levin_gu": levin_gu, "h2": h2, "xx": xx}


def hamiltonian(model: str, n_sites: int) -> SpinChainOperator:
    if model not in _BUILDERS:
        raise ParameterError(f"unknown model {model!r}; choose one of {', '.join(MODELS)}")
    _check_sites(n_sites)
    H = SpinChainOperator(n_sites, _BUILDERS[model](n_sites), label=model)
    if not H.is_hermitian():
        raise ModelError(f"{model} Hamiltonian is not hermitian")
    logger.debug(f"built {model} Hamiltonian on {n_sites} sites")
    return H


def _pairs(n_sites: int) -> list[tuple[int, int]]:
    """0-based images of the 1-based pairs (2i, 2i+1), i = 1..N/2."""
    return [(2 * i - 1, (2 * i) % n_sites) for i in range(1, n_sites // 2 + 1)]


def levin_gu_to_h2(n_sites: int) -> np.ndarray:
    """U = prod_i CZ_{2i,2i+1} X_{2i}; U^dagger H_LG U = H_2."""
    _check_sites(n_sites, minimum=4, multiple=2)
    U = np.eye(2**n_sites, dtype=complex)
    for a, b in _pairs(n_sites):
        U = U @ place(CZ, [a, b], n_sites) @ site_op(X, a, n_sites)
    return U


def _pauli_layer(n_sites: int) -> np.ndarray:
    # I, X, Y, Z on 1-based sites 1, 2, 3, 0 mod 4
    cycle = "IXYZ"
    return kron_all([PAULIS[cycle[i % 4]] for i in range(n_sites)])


def h2_to_xx(n_sites: int) -> np.ndarray:
    """Hadamards on even 1-based sites after a period-four Pauli layer; conjugates H_2 to H_XX."""
    _check_sites(n_sites, minimum=4, multiple=4)
    hadamards = kron_all([HADAMARD if i % 2 else I2 for i in range(n_sites)])
    return hadamards @ _pauli_layer(n_sites)


def czy_unitary(n_sites: int) -> np.ndarray:
    """U_CZY = prod CZ_{i,i+1} prod Z_i X_i, with X applied first."""
    _check_sites(n_sites, minimum=2)
    cz = np.eye(2**n_sites, dtype=complex)
    for i in range(n_sites):
        cz = cz @ place(CZ, [i, (i + 1) % n_sites], n_sites)
    return cz @ kron_all([Z @ X] * n_sites)


def czx_unitary(n_sites: int) -> np.ndarray:
    """prod CZ_{i,i+1} prod X_i."""
    _check_sites(n_sites, minimum=2)
    cz = np.eye(2**n_sites, dtype=complex)
    for i in range(n_sites):
        cz = cz @ place(CZ, [i, (i + 1) % n_sites], n_sites)
    return cz @ kron_all([X] * n_sites)


def charges(n_sites: int, tol: float = DEFAULT_TOL) -> dict[str, SpinChainOperator]:
    """U(1) charges of H_2 (Q_M, Q_W) and of H_LG (Q~_M, Q~_W).

    Raises ModelError when a charge fails to commute with its Hamiltonian.
    """
    _check_sites(n_sites, minimum=4, multiple=2)
    N = n_sites
    dim = 2**N
    zz = _bond_sum(Z, Z, N)
    q_m = 0.5 * sum(site_op(Y, i, N) for i in range(N))
    q_w = N / 4 * np.eye(dim) + 0.25 * zz
    zy, yz = np.kron(Z, Y), np.kron(Y, Z)
    q_m_lg = 0.5 * sum(place(zy, [a, b], N) - place(yz, [a, b], N) for a, b in _pairs(N))
    q_w_lg = N / 4 * np.eye(dim) - 0.25 * zz
    out = {
        "Q_M": SpinChainOperator(N, q_m, "Q_M"),
        "Q_W": SpinChainOperator(N, q_w, "Q_W"),
        "Q~_M": SpinChainOperator(N, q_m_lg, "Q~_M"),
        "Q~_W": SpinChainOperator(N, q_w_lg, "Q~_W"),
    }
    H2 = h2(N)
    HLG = levin_gu(N)
    for name, H in (("Q_M", H2), ("Q_W", H2), ("Q~_M", HLG), ("Q~_W", HLG)):
        Q = out[name].matrix
        defect = float(np.abs(H @ Q - Q @ H).max())
        if defect > tol:
            raise ModelError(f"{name} does not commute with its Hamiltonian (defect {defect:.3e})")
    return out


def z2_exponential(charge: SpinChainOperator) -> np.ndarray:
    """exp(i pi Q)."""
    return expm(1j * np.pi * charge.matrix)


def _defect(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a - b).max())


def equivalence_residuals(n_sites: int) -> dict[str, float]:
    """Residuals of the unitary equivalences between the three chains."""
    out = {}
    U = levin_gu_to_h2(n_sites)
    out["levin_gu_to_h2"] = _defect(U.conj().T @ levin_gu(n_sites) @ U, h2(n_sites))
    if n_sites % 4 == 0:
        V = h2_to_xx(n_sites)
        out["h2_to_xx"] = _defect(V.conj().T @ h2(n_sites) @ V, xx(n_sites))
    return out


def z2_residuals(n_sites: int, tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Residuals of the Z_2 identities generated by the Levin-Gu charges."""
    qs = charges(n_sites, tol)
    m = z2_exponential(qs["Q~_M"])
    w = z2_exponential(qs["Q~_W"])
    cz_z = czx_unitary(n_sites) @ kron_all([X] * n_sites) @ kron_all([Z] * n_sites)
    qm, qw = qs["Q~_M"].matrix, qs["Q~_W"].matrix
    U = czy_unitary(n_sites)
    return {
        "exp_charge_m": _defect(m, kron_all([X] * n_sites)),
        "exp_charge_w": _defect(w, cz_z),
        "czy_factorization": _defect(U, w @ m),
        "exponentials_commute": _defect(m @ w, w @ m),
        "czy_commutes_with_levin_gu": _defect(U @ levin_gu(n_sites), levin_gu(n_sites) @ U),
        # nonzero: the generators themselves do not commute
        "charge_commutator": _defect(qm @ qw, qw @ qm),
    }
