"""MPO and MPDO tensors built from pairs of representations.

Given phi of an algebra A and psi of its dual, the tensor
M^{ij}_{ab} = sum_I [phi(e_I)]_{ij} [psi(e^I)]_{ab} generates the MPOs of A's
pre-bialgebra. Weighting the irreducible phi_a by d_a / FPdim gives a
renormalization fixed point.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from mposym.algebra.prebialgebra import PreBialgebra, WeakHopfData, check_star, check_weak_hopf
from mposym.algebra.rep_theory import (
    FusionRing,
    Representation,
    fusion_multiplicities,
    module_isomorphic,
    wedderburn,
)
from mposym.config import DEFAULT_CAP, DEFAULT_SEED, DEFAULT_TOL
from mposym.core.tensor import MpoTensor, mpdo_contract, physical_direct_sum
from mposym.errors import (
    DegenerateRepresentationError,
    PairingError,
    PreconditionError,
    StructureError,
    TheoremPreconditionError,
)

logger = logging.getLogger(__name__)


def _dual_matrices(psi: Representation) -> np.ndarray:
    """psi(e^I) on the original dual basis, without an adjoined unit."""
    return psi.matrices[1:] if psi.algebra.adjoined_unit else psi.matrices


def build_mpo_tensor(phi: Representation, psi: Representation) -> MpoTensor:
    psi_mats = _dual_matrices(psi)
    if len(phi.matrices) != len(psi_mats):
        raise PairingError(
            f"phi covers {len(phi.matrices)} basis elements but psi covers {len(psi_mats)}"
        )
    data = np.einsum("kij,kab->ijab", phi.matrices, psi_mats)
    return MpoTensor(data, name=f"({phi.name},{psi.name})")


@dataclass
class HypothesisReport:
    transitive: bool
    duals: dict[str, str | None]
    failing: list[str] = field(default_factory=list)
    # fusion graph a -> c for c in a x b
    strongly_connected: bool = False

    @property
    def passed(self) -> bool:
        return not self.failing


def check_fixed_point_hypotheses(ring: FusionRing) -> HypothesisReport:
    """Transitivity of the fusion rules and existence of a dual label with N_{a*} = N_a^T."""
    N = (ring.N > 0).astype(int)
    # reach[a, d]: d appears in a x c for some c
    reach = N.any(axis=1).astype(int)
    transitive = bool(np.all(np.einsum("ad,dab->ab", reach, N) > 0))
    duals: dict[str, str | None] = {}
    for a in range(ring.rank):
        duals[ring.labels[a]] = next(
            (ring.labels[b] for b in range(ring.rank) if np.array_equal(ring.left(b), ring.left(a).T)),
            None,
        )
    failing = []
    if not transitive:
        failing.append("transitivity")
    failing.extend(f"dual of {a}" for a, b in duals.items() if b is None)
    return HypothesisReport(transitive, duals, failing, strongly_connected=ring.is_transitive())


@dataclass
class RfpConstruction:
    tensor: MpoTensor
    irreps: list[Representation]
    ring: FusionRing
    weights: list[float]


def fusion_ring_of(
    algebra: PreBialgebra,
    irreps: list[Representation] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> tuple[list[Representation], FusionRing]:
    """Irreps of a semisimple pre-bialgebra with their fusion ring.

    When ``irreps`` are given they are kept in that gauge and matched to the
    central idempotents by isomorphism.
    """
    wd = wedderburn(algebra, tol, seed)
    if irreps is None:
        return wd.irreps, fusion_multiplicities(wd.irreps, wd.central_idempotents, algebra)
    central = []
    for rep in irreps:
        for ref, z in zip(wd.irreps, wd.central_idempotents, strict=True):
            if ref.dim == rep.dim and module_isomorphic(rep, ref, tol, seed) is not None:
                central.append(z)
                break
        else:
            raise DegenerateRepresentationError(f"{rep.name} is not an irreducible representation of the algebra")
    return irreps, fusion_multiplicities(irreps, central, algebra)


def build_rfp_tensor(
    algebra: PreBialgebra,
    psi: Representation,
    irreps: list[Representation] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> RfpConstruction:
    """Direct sum over Irr(A) of the (phi_a, psi) tensors weighted by d_a / FPdim."""
    irreps, ring = fusion_ring_of(algebra, irreps, tol, seed)
    hypotheses = check_fixed_point_hypotheses(ring)
    if not hypotheses.passed:
        raise TheoremPreconditionError(f"fixed-point construction needs {', '.join(hypotheses.failing)}")
    dims = ring.quantum_dims()
    weights = [float(d / ring.fpdim()) for d in dims]
    tensors = [build_mpo_tensor(phi, psi) for phi in irreps]
    M = physical_direct_sum(tensors, weights)
    logger.info(f"fixed-point tensor: physical dim {M.d_out}, bond dim {M.bond}, weights {weights}")
    return RfpConstruction(MpoTensor(M.data, name="rfp"), irreps, ring, weights)


@dataclass
class PositivityResult:
    element: np.ndarray
    witness: np.ndarray | None
    min_eigenvalue: float
    residual: float = float("nan")


def character_element(psi: Representation) -> np.ndarray:
    """x = sum_I Tr[psi(e^I)] e_I."""
    return np.einsum("kaa->k", _dual_matrices(psi))


def check_positivity(
    algebra: PreBialgebra, psi: Representation, star_rep: np.ndarray, tol: float = DEFAULT_TOL
) -> PositivityResult:
    """Factor x = y y* through a faithful *-representation, or report why not."""
    if algebra.star is None:
        raise PreconditionError("positivity needs a star operation")
    star_report = check_star(algebra, star_rep, tol)
    if not star_report.ok:
        raise PreconditionError(f"representation is not a *-representation: {star_report.residuals}")
    flat = star_rep.reshape(algebra.dim, -1)
    if np.linalg.matrix_rank(flat, tol=tol * max(1.0, np.abs(flat).max())) < algebra.dim:
        raise PreconditionError("positivity needs a faithful representation")

    x = character_element(psi)
    if np.abs(algebra.apply_star(x) - x).max() > tol:
        raise StructureError("x is not self-adjoint under the star operation")
    image = np.einsum("k,kab->ab", x, star_rep)
    vals, vecs = np.linalg.eigh((image + image.conj().T) / 2)
    if vals.min() < -tol:
        logger.info(f"x is not positive: smallest eigenvalue {vals.min():.3e}")
        return PositivityResult(x, None, float(vals.min()))
    root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    y, *_ = np.linalg.lstsq(flat.T, root.reshape(-1), rcond=None)
    if np.abs(flat.T @ y - root.reshape(-1)).max() > np.sqrt(tol):
        logger.warning("square root of x lies outside the representation's image")
        return PositivityResult(x, None, float(vals.min()))
    residual = float(np.abs(algebra.multiply(y, algebra.apply_star(y)) - x).max())
    return PositivityResult(x, y, float(vals.min()), residual)


@dataclass
class WhaRfpData:
    functional: np.ndarray
    characters: np.ndarray
    weight: np.ndarray
    boundary: np.ndarray
    element: np.ndarray
    ring: FusionRing
    biconnected: bool | None = None


def canonical_regular_element(irreps: list[Representation], ring: FusionRing) -> tuple[np.ndarray, np.ndarray]:
    """Values omega(e_I) = sum_a d_a / FPdim Tr phi_a(e_I), plus the characters x_a."""
    characters = np.stack([np.einsum("kaa->k", rep.matrices) for rep in irreps])
    weights = ring.quantum_dims() / ring.fpdim()
    return weights @ characters, characters


def wha_rfp_tensor(
    algebra: PreBialgebra,
    hopf: WeakHopfData,
    phi: Representation,
    psi: Representation,
    element: np.ndarray | None = None,
    biconnected: bool | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> tuple[MpoTensor, WhaRfpData]:
    """Fixed-point tensor sum_I [b phi(e_I)]_{ij} [psi(e^I)]_{ab} of a weak Hopf algebra with boundary B(x)."""
    report = check_weak_hopf(algebra, hopf, tol)
    if not report.ok:
        failing = [name for name, ok in report.passed.items() if not ok]
        raise TheoremPreconditionError(f"not a weak Hopf algebra: {failing}")
    irreps, ring = fusion_ring_of(algebra, tol=tol, seed=seed)
    if biconnected is None:
        biconnected = check_fixed_point_hypotheses(ring).strongly_connected
        logger.info(f"biconnectedness read off the fusion graph: {biconnected}")
    functional, characters = canonical_regular_element(irreps, ring)

    mats = phi.matrices
    gram = np.einsum("jab,iba->ij", mats, mats)
    try:
        beta = np.linalg.solve(gram, functional)
    except np.linalg.LinAlgError as e:
        raise DegenerateRepresentationError(f"trace form of phi is singular: {e}") from e
    if np.abs(gram @ beta - functional).max() > np.sqrt(tol):
        raise DegenerateRepresentationError("weight matrix does not reproduce the regular element")
    weight = np.einsum("j,jab->ab", beta, mats)

    psi_mats = _dual_matrices(psi)
    if len(psi_mats) != algebra.dim:
        raise PairingError(f"psi covers {len(psi_mats)} basis elements, algebra has {algebra.dim}")
    if element is None:
        element = algebra.unit
    # Tr[B psi(e^I)] = x_I
    system = np.stack([m.T.reshape(-1) for m in psi_mats])
    solution, *_ = np.linalg.lstsq(system, element, rcond=None)
    if np.abs(system @ solution - element).max() > np.sqrt(tol):
        raise DegenerateRepresentationError("no boundary matrix reproduces x on the dual basis")
    D = psi.dim
    boundary = solution.reshape(D, D)

    data = np.einsum("ij,kjl,kab->ilab", weight, mats, psi_mats)
    tensor = MpoTensor(data, name="wha_rfp")
    return tensor, WhaRfpData(functional, characters, weight, boundary, element, ring, biconnected)


def compare_mpdos(first: MpoTensor, second: MpoTensor, n_max: int = 4, cap: int = DEFAULT_CAP) -> dict[int, float]:
    """max |rho_1^(N) - rho_2^(N)| on rings of N = 1..n_max sites."""
    return {
        n: float(np.abs(mpdo_contract(first, n, cap).matrix - mpdo_contract(second, n, cap).matrix).max())
        for n in range(1, n_max + 1)
    }


@dataclass
class UnitaryFit:
    unitary: np.ndarray
    residual: float
    success: bool


def _hermitian(params: np.ndarray, d: int) -> np.ndarray:
    H = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    n_off = len(iu[0])
    H[np.diag_indices(d)] = params[:d]
    H[iu] = params[d : d + n_off] + 1j * params[d + n_off :]
    return H + np.triu(H, 1).conj().T


def fit_local_unitary(
    rho: np.ndarray,
    target: np.ndarray,
    d: int,
    n_sites: int,
    seed: int = DEFAULT_SEED,
    starts: int = 4,
) -> UnitaryFit:
    """Best single-site u with u^{(x)N} rho u^{dagger (x)N} close to target in Frobenius norm."""
    rng = np.random.default_rng(seed)
    scale = max(np.linalg.norm(target), 1e-300)

    def loss(params: np.ndarray) -> float:
        u = expm(1j * _hermitian(params, d))
        U = u
        for _ in range(n_sites - 1):
            U = np.kron(U, u)
        return float(np.linalg.norm(U @ rho @ U.conj().T - target) / scale)

    best = None
    for _ in range(starts):
        result = minimize(loss, rng.normal(scale=0.5, size=d * d), method="BFGS")
        if best is None or result.fun < best.fun:
            best = result
    u = expm(1j * _hermitian(best.x, d))
    logger.info(f"local unitary fit residual {best.fun:.3e}")
    return UnitaryFit(u, float(best.fun), bool(best.fun < 1e-6))
