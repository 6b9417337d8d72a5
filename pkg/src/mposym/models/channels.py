"""Kraus channels relating the CZY and double-semion boundary states."""

import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np
from scipy.linalg import expm

from mposym.config import DEFAULT_TOL
from mposym.errors import ParameterError, ShapeError
from mposym.models.pauli import CNOT, I2, Z
from mposym.models.spin_chains import czx_unitary, czy_unitary

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    kraus: tuple[np.ndarray, ...]
    name: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=complex) for K in self.kraus)
        if not ops:
            raise ShapeError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(K.shape != shape for K in ops):
            raise ShapeError(f"{self.name}: Kraus operators differ in shape")
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        if rho.shape != (self.d_in, self.d_in):
            raise ShapeError(f"{self.name} acts on dimension {self.d_in}, got {rho.shape}")
        return sum(K @ rho @ K.conj().T for K in self.kraus)

    def trace_preserving_residual(self) -> float:
        total = sum(K.conj().T @ K for K in self.kraus)
        return float(np.abs(total - np.eye(self.d_in)).max())

    def tensor_power(self, n: int) -> "QuantumChannel":
        """The channel applied independently to n subsystems, in order."""
        ops = tuple(reduce(np.kron, combo) for combo in product(self.kraus, repeat=n))
        return QuantumChannel(ops, name=f"{self.name}^{n}")

    def compose(self, other: "QuantumChannel") -> "QuantumChannel":
        """self after other."""
        return QuantumChannel(tuple(K @ L for K in self.kraus for L in other.kraus), name=f"{self.name}.{other.name}")


def _ket(b: int) -> np.ndarray:
    return np.eye(2, dtype=complex)[:, [b]]


def encoding_channel() -> QuantumChannel:
    """E(rho) = CNOT (rho (x) |0><0|) CNOT."""
    return QuantumChannel((CNOT @ np.kron(I2, _ket(0)),), name="E")


def recovery_channel() -> QuantumChannel:
    """R(rho) = Tr_2[CNOT rho CNOT]."""
    return QuantumChannel(tuple(np.kron(I2, _ket(b).T) @ CNOT for b in (0, 1)), name="R")


def local_unitary(n_sites: int) -> np.ndarray:
    """u^{(x)N} with u = exp(i pi Z / 4), alternating u and u^dagger when N is not a multiple of four."""
    if n_sites < 2 or n_sites % 2:
        raise ParameterError(f"the boundary map needs an even number of sites, got {n_sites}")
    u = expm(1j * np.pi / 4 * Z)
    if n_sites % 4 == 0:
        factors = [u] * n_sites
    else:
        factors = [u if i % 2 == 0 else u.conj().T for i in range(n_sites)]
    return reduce(np.kron, factors)


def czy_state(n_sites: int) -> np.ndarray:
    """(1 + U_CZY) / 2^N."""
    return (np.eye(2**n_sites) + czy_unitary(n_sites)) / 2**n_sites


def czx_state(n_sites: int) -> np.ndarray:
    return (np.eye(2**n_sites) + czx_unitary(n_sites)) / 2**n_sites


def double_semion_boundary_state(n_sites: int) -> np.ndarray:
    """(Pi + U Pi) / 2^N on 2N qubits ordered site, copy, site, copy, ...

    Pi projects onto Z_{2i} Z_{2i+1} = 1 and U = prod CZ_{2i+1,2i+2} prod X_{2i} X_{2i+1}.
    """
    if n_sites < 2:
        raise ParameterError(f"the boundary state needs at least two sites, got {n_sites}")
    m = 2 * n_sites
    index = np.arange(2**m)
    bits = (index[:, None] >> (m - 1 - np.arange(m))) & 1
    code = np.all(bits[:, 0::2] == bits[:, 1::2], axis=1).astype(float)
    links = sum(bits[:, 2 * i + 1] * bits[:, (2 * i + 2) % m] for i in range(n_sites))
    phase = (-1.0) ** links
    flipped = index[::-1]
    rho = np.diag(code).astype(complex)
    # X on every qubit sends |b> to |~b>
    rho[flipped, index] += phase[flipped] * code
    return rho / 2**n_sites


@dataclass
class ChannelReport:
    n_sites: int
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())


def semion_channel_check(n_sites: int, tol: float = DEFAULT_TOL) -> ChannelReport:
    """Map rho_CZY to the double-semion boundary state on 2N sites and back.

    The forward image is compared with the boundary state built directly on
    the doubled chain.
    """
    u = local_unitary(n_sites)
    E = encoding_channel()
    R = recovery_channel()
    En = E.tensor_power(n_sites)
    Rn = R.tensor_power(n_sites)

    rho_czy = czy_state(n_sites)
    rotated = u @ rho_czy @ u.conj().T
    boundary = En(rotated)
    reference = double_semion_boundary_state(n_sites)
    recovered = u.conj().T @ Rn(boundary) @ u

    report = ChannelReport(n_sites, tol=tol)
    report.residuals = {
        "trace_preserving_E": E.trace_preserving_residual(),
        "trace_preserving_R": R.trace_preserving_residual(),
        "local_unitary_relation": float(np.abs(rotated - czx_state(n_sites)).max()),
        "forward": float(np.abs(boundary - reference).max()),
        "recovery": float(np.abs(recovered - rho_czy).max()),
        "boundary_trace": abs(float(np.trace(boundary).real) - 1.0),
    }
    logger.info(f"double-semion channel check on {n_sites} sites: {report.residuals}")
    return report
