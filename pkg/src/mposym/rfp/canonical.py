"""Vertical canonical form of MPDO tensors and the fixed-point fusion criterion.

Read along the physical direction, an MPDO tensor M is a family of physical
matrices M_(ab) indexed by bond pairs. Its invariant-subspace decomposition
gives U M_(ab) U^dagger = sum_a mu_a (x) M_(ab),a with normal blocks M_a.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from mposym.algebra.rep_theory import find_isomorphism, split_module
from mposym.config import DEFAULT_SEED, DEFAULT_TOL
from mposym.core.tensor import MpoTensor
from mposym.errors import ShapeError

logger = logging.getLogger(__name__)


@dataclass
class CanonicalBlock:
    label: str
    mu: np.ndarray
    tensor: MpoTensor
    normalization: float

    @property
    def weight(self) -> float:
        """m_a = Tr mu_a."""
        return float(np.sum(self.mu).real)


@dataclass
class CanonicalForm:
    source: MpoTensor
    isometry: np.ndarray
    blocks: list[CanonicalBlock]
    residual: float = 0.0

    def assemble(self) -> np.ndarray:
        """U^dagger (sum_a mu_a (x) M_a) U as raw tensor data."""
        parts = [np.kron(np.diag(b.mu), np.eye(b.tensor.d_out)) for b in self.blocks]
        dims = [p.shape[0] for p in parts]
        total = sum(dims)
        D = self.source.bond
        out = np.zeros((total, total, D, D), dtype=complex)
        offset = 0
        for block, size in zip(self.blocks, dims, strict=True):
            d = block.tensor.d_out
            for copy, mu in enumerate(block.mu):
                start = offset + copy * d
                out[start : start + d, start : start + d] = mu * block.tensor.data
            offset += size
        U = self.isometry
        return np.einsum("pi,pqab,qj->ijab", U.conj(), out, U)


def transfer_radius(M: np.ndarray) -> float:
    """Spectral radius of sum_(ab) M_(ab) (x) conj(M_(ab)) for data M[i, j, a, b]."""
    d = M.shape[0]
    E = np.einsum("ijab,klab->ikjl", M, M.conj()).reshape(d * d, d * d)
    return float(np.max(np.abs(np.linalg.eigvals(E)), initial=0.0))


def is_normal(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Whether the physical matrices M_(ab) generate the full matrix algebra."""
    d = M.shape[0]
    gens = M.transpose(2, 3, 0, 1).reshape(-1, d, d)
    span = _basis(gens.reshape(len(gens), -1), tol)
    while True:
        products = np.einsum("pij,qjk->pqik", span.reshape(-1, d, d), gens).reshape(-1, d * d)
        grown = _basis(np.vstack([span, products]), tol)
        if len(grown) == len(span):
            return len(span) == d * d
        span = grown


def _basis(rows: np.ndarray, tol: float) -> np.ndarray:
    if not len(rows):
        return rows
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vh[:rank]


def _vertical_family(M: np.ndarray) -> np.ndarray:
    """Physical matrices and their adjoints, closed under the star."""
    d = M.shape[0]
    mats = M.transpose(2, 3, 0, 1).reshape(-1, d, d)
    return np.concatenate([mats, mats.conj().transpose(0, 2, 1)])


def _unitary_part(T: np.ndarray) -> np.ndarray:
    """Scale an intertwiner between normal blocks to a unitary."""
    return T / np.sqrt(np.trace(T @ T.conj().T).real / T.shape[0])


@dataclass
class _Piece:
    basis: np.ndarray
    data: np.ndarray
    scale: float


def _pieces(M: np.ndarray, tol: float, seed: int) -> list[_Piece]:
    parts = split_module(_vertical_family(M), seed=seed, tol=tol, hermitian=True)
    pieces = []
    for K in parts:
        data = np.einsum("pi,pqab,qj->ijab", K.conj(), M, K)
        r = transfer_radius(data)
        if r <= tol:
            continue
        scale = np.sqrt(r)
        pieces.append(_Piece(K, data / scale, float(scale)))
    return pieces


def vertical_canonical_form(M: MpoTensor, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> CanonicalForm:
    if M.d_out != M.d_in:
        raise ShapeError("vertical canonical form needs equal physical dimensions")
    classes: list[tuple[np.ndarray, list[float], list[np.ndarray]]] = []
    for piece in _pieces(M.data, tol, seed):
        fam = piece.data.transpose(2, 3, 0, 1).reshape(-1, piece.data.shape[0], piece.data.shape[0])
        for rep, mus, bases in classes:
            ref = rep.transpose(2, 3, 0, 1).reshape(fam.shape)
            if ref.shape != fam.shape:
                continue
            T = find_isomorphism(fam, ref, tol, seed)
            if T is not None:
                V = _unitary_part(T)
                # piece = V^dagger rep V, so its basis becomes K V^dagger
                mus.append(piece.scale)
                bases.append(piece.basis @ V.conj().T)
                break
        else:
            classes.append((piece.data, [piece.scale], [piece.basis]))

    blocks = []
    columns = []
    for k, (rep, mus, bases) in enumerate(classes):
        normal = is_normal(rep, tol ** 0.5)
        if not normal:
            logger.warning(f"block {k} is not normal; it may hide a further splitting")
        blocks.append(
            CanonicalBlock(f"M_{k}", np.array(mus), MpoTensor(rep, name=f"M_{k}"), 1.0 / mus[0])
        )
        columns.extend(bases)
    U = np.hstack(columns).conj().T if columns else np.zeros((0, M.d_out), dtype=complex)
    cf = CanonicalForm(M, U, blocks)
    cf.residual = float(np.abs(cf.assemble() - M.data).max(initial=0.0))
    logger.info(
        f"vertical canonical form: {len(blocks)} blocks of sizes {[b.tensor.d_out for b in blocks]}, "
        f"residual {cf.residual:.3e}"
    )
    return cf


@dataclass
class RfpReport:
    isometries: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    chi: dict[tuple[int, int, int], np.ndarray] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    unidentified: list[tuple[int, int]] = field(default_factory=list)
    tol: float = DEFAULT_TOL

    @property
    def is_rfp(self) -> bool:
        return not self.unidentified and all(r <= self.tol for r in self.residuals.values())

    def multiplicities(self, n_blocks: int) -> np.ndarray:
        N = np.zeros((n_blocks,) * 3, dtype=int)
        for (a, b, c), chi in self.chi.items():
            N[a, b, c] = len(chi)
        return N


def chi_spread(chi: dict[tuple[int, int, int], np.ndarray]) -> float:
    """Largest deviation of a chi_abc entry from the mean of its chi_abc."""
    return max((float(np.abs(c - c.mean()).max()) for c in chi.values() if len(c)), default=0.0)


def _blocked_pair(Ma: np.ndarray, Mb: np.ndarray) -> np.ndarray:
    da, db, D = Ma.shape[0], Mb.shape[0], Ma.shape[2]
    return np.einsum("ijab,klbc->ikjlac", Ma, Mb).reshape(da * db, da * db, D, D)


def verify_rfp(cf: CanonicalForm, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> RfpReport:
    """Check that two blocked normal tensors decompose into weighted copies of the blocks.

    Also checks that every chi_abc is a multiple of the identity and that
    m_c = sum_ab Tr[chi_abc] m_a m_b.
    """
    report = RfpReport(tol=tol)
    blocks = cf.blocks
    n = len(blocks)
    iso_residual = 0.0
    fit_residual = 0.0
    for a in range(n):
        for b in range(n):
            stacked = _blocked_pair(blocks[a].tensor.data, blocks[b].tensor.data)
            rows = []
            rebuilt = np.zeros_like(stacked)
            for piece in _pieces(stacked, tol, seed):
                fam = piece.data.transpose(2, 3, 0, 1).reshape(-1, piece.data.shape[0], piece.data.shape[0])
                for c, target in enumerate(blocks):
                    ref = target.tensor.data.transpose(2, 3, 0, 1).reshape(-1, target.tensor.d_out, target.tensor.d_out)
                    if ref.shape != fam.shape:
                        continue
                    T = find_isomorphism(fam, ref, tol, seed)
                    if T is None:
                        continue
                    V = _unitary_part(T)
                    aligned = piece.basis @ V.conj().T
                    rows.append(aligned.conj().T)
                    key = (a, b, c)
                    report.chi[key] = np.append(report.chi.get(key, np.zeros(0)), piece.scale)
                    rebuilt += piece.scale * np.einsum("ip,pqxy,jq->ijxy", aligned, target.tensor.data, aligned.conj())
                    break
                else:
                    report.unidentified.append((a, b))
            if rows:
                W = np.vstack(rows)
                report.isometries[(a, b)] = W
                iso_residual = max(iso_residual, float(np.abs(W @ W.conj().T - np.eye(len(W))).max()))
            fit_residual = max(fit_residual, float(np.abs(rebuilt - stacked).max(initial=0.0)))

    report.residuals["isometry"] = iso_residual
    report.residuals["decomposition"] = fit_residual
    report.residuals["chi_scalar"] = chi_spread(report.chi)
    m = np.array([blk.weight for blk in blocks])
    consistency = 0.0
    for c in range(n):
        total = sum(float(np.sum(chi)) * m[a] * m[b] for (a, b, cc), chi in report.chi.items() if cc == c)
        consistency = max(consistency, abs(total - m[c]))
    report.residuals["weight_consistency"] = consistency
    if report.unidentified:
        logger.info(f"blocked pairs with summands outside the canonical form: {report.unidentified}")
    return report
