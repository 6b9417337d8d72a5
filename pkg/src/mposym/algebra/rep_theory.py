"""Numerical representation theory of finite-dimensional algebras.

Modules are split with generic elements of their endomorphism algebra: the
generalized eigenspaces of a generic endomorphism are submodules, and a module
whose generic endomorphisms have a single eigenvalue is indecomposable.
"""

import logging
from dataclasses import dataclass, field, replace

import networkx as nx
import numpy as np
from scipy.linalg import null_space, orth, schur

from mposym.algebra.prebialgebra import PreBialgebra, find_unit
from mposym.config import (
    CLUSTER_TOL,
    DEFAULT_SEED,
    DEFAULT_TOL,
    INTEGRALITY_TOL,
    INVARIANCE_TOL,
    MAX_CONDITION,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    SPLIT_ATTEMPTS,
)
from mposym.errors import (
    DegenerateRepresentationError,
    InconsistentCoproductError,
    LiftingError,
    NotSemisimpleError,
    PreconditionError,
    ShapeError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Representation:
    algebra: PreBialgebra
    matrices: np.ndarray
    name: str = ""
    faithful: bool | None = None
    irreducible: bool | None = None
    indecomposable: bool | None = None

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ShapeError(f"representation matrices must be (n, d, d), got {mats.shape}")
        if mats.shape[0] != self.algebra.dim:
            raise ShapeError(f"expected {self.algebra.dim} matrices, got {mats.shape[0]}")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Image of the algebra element with coordinates x."""
        return np.einsum("i,iab->ab", x, self.matrices)

    def residual(self) -> float:
        return homomorphism_residual(self.algebra, self.matrices)

    def restrict(self, basis: np.ndarray, name: str = "") -> "Representation":
        """Action on the invariant subspace spanned by the columns of ``basis``."""
        sub = np.einsum("ai,kij,jb->kab", np.linalg.pinv(basis), self.matrices, basis)
        return Representation(self.algebra, sub, name=name)

    def checked(self, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> "Representation":
        """Copy with the faithful / irreducible / indecomposable flags filled in."""
        flat = self.matrices.reshape(self.algebra.dim, -1)
        rank = int(np.linalg.matrix_rank(flat, tol=tol * max(1.0, np.abs(flat).max())))
        return replace(
            self,
            faithful=rank == self.algebra.dim,
            irreducible=self.dim > 0 and rank == self.dim**2,
            indecomposable=len(split_module(self.matrices, seed=seed, tol=tol)) == 1,
        )


def homomorphism_residual(algebra: PreBialgebra, matrices: np.ndarray) -> float:
    """max |rho(e_I) rho(e_J) - sum_K lam[I, J, K] rho(e_K)|."""
    lhs = np.einsum("iab,jbc->ijac", matrices, matrices)
    rhs = np.einsum("ijk,kac->ijac", algebra.lam, matrices)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def direct_sum(reps: list[Representation], name: str = "") -> Representation:
    if not reps:
        raise ShapeError("direct sum of no representations")
    n = reps[0].algebra.dim
    total = sum(r.dim for r in reps)
    mats = np.zeros((n, total, total), dtype=complex)
    offset = 0
    for r in reps:
        mats[:, offset : offset + r.dim, offset : offset + r.dim] = r.matrices
        offset += r.dim
    return Representation(reps[0].algebra, mats, name=name or "+".join(r.name for r in reps))


# module splitting


def _linear_solutions(mats_from: np.ndarray, mats_to: np.ndarray, tol: float) -> np.ndarray:
    """Basis of {T : T rho_from(e_I) = rho_to(e_I) T}, as (k, d_to, d_from)."""
    d_to, d_from = mats_to.shape[1], mats_from.shape[1]
    system = np.vstack(
        [
            np.kron(np.eye(d_to), a.T) - np.kron(b, np.eye(d_from))
            for a, b in zip(mats_from, mats_to, strict=True)
        ]
    )
    basis = null_space(system, rcond=tol)
    return basis.T.reshape(-1, d_to, d_from)


def endomorphisms(matrices: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    return _linear_solutions(matrices, matrices, tol)


def _clusters(values: np.ndarray, radius: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        for g in groups:
            if abs(v - values[g[0]]) < radius:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _spectral_subspaces(T: np.ndarray, hermitian: bool) -> list[np.ndarray] | None:
    """Bases of the generalized eigenspaces of T, one per eigenvalue cluster."""
    d = T.shape[0]
    if hermitian:
        vals, vecs = np.linalg.eigh(T)
        radius = CLUSTER_TOL * max(1.0, float(np.abs(vals).max()))
        return [vecs[:, g] for g in _clusters(vals, radius)]
    vals = np.linalg.eigvals(T)
    radius = CLUSTER_TOL * max(1.0, float(np.abs(vals).max()))
    groups = _clusters(vals, radius)
    bases = []
    for g in groups:
        center = vals[g].mean()
        _, Z, sdim = schur(T, output="complex", sort=lambda x, c=center: abs(x - c) < 2 * radius)
        if sdim != len(g):
            return None
        bases.append(Z[:, :sdim])
    if sum(b.shape[1] for b in bases) != d:
        return None
    return bases


def _is_invariant(matrices: np.ndarray, basis: np.ndarray) -> bool:
    complement = np.eye(basis.shape[0]) - basis @ np.linalg.pinv(basis)
    scale = max(1.0, float(np.abs(matrices).max()))
    leak = np.einsum("ij,kjl,lb->kib", complement, matrices, basis)
    return float(np.abs(leak).max(initial=0.0)) <= INVARIANCE_TOL * scale


def _split_once(
    matrices: np.ndarray, rng: np.random.Generator, tol: float, hermitian: bool
) -> list[np.ndarray] | None:
    ends = endomorphisms(matrices, tol)
    if len(ends) <= 1:
        return None
    single = 0
    for _ in range(SPLIT_ATTEMPTS):
        coeffs = rng.normal(size=len(ends)) + 1j * rng.normal(size=len(ends))
        T = np.einsum("k,kij->ij", coeffs, ends)
        if hermitian:
            T = T + T.conj().T
        bases = _spectral_subspaces(T, hermitian)
        if bases is None:
            logger.debug("eigenvalue clusters overlap; drawing a new endomorphism")
            continue
        if len(bases) == 1:
            single += 1
            if single == 2:
                return None
            continue
        Q = np.hstack(bases)
        if np.linalg.cond(Q) > MAX_CONDITION or not all(_is_invariant(matrices, b) for b in bases):
            logger.debug("ill-conditioned splitting; drawing a new endomorphism")
            continue
        return bases
    logger.warning(f"no clean splitting after {SPLIT_ATTEMPTS} attempts; treating module as indecomposable")
    return None


def _split(matrices: np.ndarray, rng: np.random.Generator, tol: float, hermitian: bool) -> list[np.ndarray]:
    d = matrices.shape[1]
    if d <= 1:
        return [np.eye(d, dtype=complex)]
    parts = _split_once(matrices, rng, tol, hermitian)
    if parts is None:
        return [np.eye(d, dtype=complex)]
    out = []
    for K in parts:
        sub = np.einsum("ai,kij,jb->kab", K.conj().T, matrices, K)
        out.extend(K @ child for child in _split(sub, rng, tol, hermitian))
    return out


def split_module(
    matrices: np.ndarray, seed: int = DEFAULT_SEED, tol: float = DEFAULT_TOL, hermitian: bool = False
) -> list[np.ndarray]:
    """Bases of indecomposable summands; their concatenation is invertible.

    With ``hermitian`` the family is assumed closed under adjoints and the
    summands come out mutually orthogonal.
    """
    rng = np.random.default_rng(seed)
    return _split(np.asarray(matrices, dtype=complex), rng, tol, hermitian)


def module_isomorphic(
    rho1: Representation, rho2: Representation, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> np.ndarray | None:
    """Invertible T with T rho1(e_I) = rho2(e_I) T, or None."""
    if rho1.dim != rho2.dim:
        raise PreconditionError(f"cannot compare modules of dimensions {rho1.dim} and {rho2.dim}")
    return find_isomorphism(rho1.matrices, rho2.matrices, tol, seed)


def find_isomorphism(
    first: np.ndarray, second: np.ndarray, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> np.ndarray | None:
    """Invertible T intertwining two families of equal-size matrices, or None."""
    if first.shape != second.shape:
        return None
    if first.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    homs = _linear_solutions(first, second, tol)
    if len(homs) == 0:
        return None
    rng = np.random.default_rng(seed)
    for _ in range(3):
        coeffs = rng.normal(size=len(homs)) + 1j * rng.normal(size=len(homs))
        T = np.einsum("k,kij->ij", coeffs, homs)
        if np.linalg.cond(T) < MAX_CONDITION:
            return T
    return None


# regular module, radical, idempotents


def _require_unit(algebra: PreBialgebra, tol: float) -> np.ndarray:
    unit = algebra.unit if algebra.unit is not None else find_unit(algebra, tol)
    if unit is None:
        raise PreconditionError("algebra has no unit; unitize it first")
    return unit


def regular_representation(algebra: PreBialgebra, tol: float = DEFAULT_TOL) -> Representation:
    _require_unit(algebra, tol)
    return Representation(algebra, algebra.left_regular(), name="reg")


def radical(algebra: PreBialgebra, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Basis (rows, in coordinates) of the Jacobson radical via the trace form."""
    L = regular_representation(algebra, tol).matrices
    form = np.einsum("iab,jba->ij", L, L)
    basis = null_space(form, rcond=tol).T
    if len(basis):
        # radical elements act nilpotently
        n = algebra.dim
        for x in basis:
            power = np.linalg.matrix_power(np.einsum("i,iab->ab", x, L), n)
            if np.abs(power).max() > np.sqrt(tol):
                raise NotSemisimpleError("trace-form kernel contains a non-nilpotent element")
    logger.debug(f"radical dimension {len(basis)}")
    return basis


def _newton_idempotent(algebra: PreBialgebra, e: np.ndarray) -> np.ndarray:
    for _ in range(NEWTON_MAX_ITER):
        e2 = algebra.multiply(e, e)
        if np.abs(e2 - e).max() < NEWTON_TOL:
            return e
        e = 3 * e2 - 2 * algebra.multiply(e2, e)
    e2 = algebra.multiply(e, e)
    if np.abs(e2 - e).max() < np.sqrt(NEWTON_TOL):
        return e
    raise LiftingError(f"idempotent iteration did not converge in {NEWTON_MAX_ITER} steps")


@dataclass
class RegularSplitting:
    parts: list[np.ndarray]
    idempotents: list[np.ndarray]


def _split_regular(algebra: PreBialgebra, tol: float, seed: int) -> RegularSplitting:
    unit = _require_unit(algebra, tol)
    reg = regular_representation(algebra, tol)
    parts = split_module(reg.matrices, seed=seed, tol=tol)
    Q = np.hstack(parts)
    Qinv = np.linalg.inv(Q)
    idempotents = []
    offset = 0
    for K in parts:
        projection = K @ Qinv[offset : offset + K.shape[1]]
        offset += K.shape[1]
        # projections onto summands of the regular module are right multiplications by idempotents
        idempotents.append(_newton_idempotent(algebra, projection @ unit))
    return RegularSplitting(parts, idempotents)


def primitive_idempotents(
    algebra: PreBialgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> list[np.ndarray]:
    """Orthogonal primitive idempotents summing to the unit."""
    idempotents = _split_regular(algebra, tol, seed).idempotents
    unit = _require_unit(algebra, tol)
    gap = np.abs(sum(idempotents) - unit).max()
    if gap > np.sqrt(tol):
        raise LiftingError(f"idempotents do not sum to the unit (off by {gap:.3e})")
    return idempotents


# decompositions


@dataclass
class Summand:
    representation: Representation
    multiplicity: int
    label: str


@dataclass
class ModuleDecomposition:
    summands: list[Summand]
    intertwiner: np.ndarray
    block_dims: list[int] = field(default_factory=list)
    residual: float = 0.0

    @property
    def dims(self) -> list[int]:
        return [s.representation.dim for s in self.summands for _ in range(s.multiplicity)]

    def multiplicities(self) -> dict[str, int]:
        return {s.label: s.multiplicity for s in self.summands}

    def total_dim(self) -> int:
        return sum(s.multiplicity * s.representation.dim for s in self.summands)


def block_residual(matrices: np.ndarray, Q: np.ndarray, block_dims: list[int]) -> float:
    """Largest entry of Q^-1 rho Q outside the diagonal blocks."""
    conj = np.einsum("ij,kjl,lm->kim", np.linalg.inv(Q), matrices, Q)
    mask = np.ones(conj.shape[1:], dtype=bool)
    offset = 0
    for d in block_dims:
        mask[offset : offset + d, offset : offset + d] = False
        offset += d
    return float(np.abs(conj[:, mask]).max(initial=0.0))


def _group_parts(
    rep: Representation,
    parts: list[np.ndarray],
    catalog: list[Representation],
    tol: float,
    seed: int,
    prefix: str,
) -> ModuleDecomposition:
    summands: list[Summand] = []
    unknown = 0
    for K in parts:
        piece = rep.restrict(K)
        for s in summands:
            if s.representation.dim == piece.dim and module_isomorphic(piece, s.representation, tol, seed) is not None:
                s.multiplicity += 1
                break
        else:
            label = None
            for ref in catalog:
                if ref.dim == piece.dim and module_isomorphic(piece, ref, tol, seed) is not None:
                    label = ref.name
                    piece = replace(piece, name=ref.name)
                    break
            if label is None:
                label = f"{prefix}{len(summands)}" if not catalog else f"unidentified_{unknown}"
                if catalog:
                    unknown += 1
                    logger.warning(f"summand of dimension {piece.dim} matches nothing in the catalog")
                piece = replace(piece, name=label)
            summands.append(Summand(piece, 1, label))
    Q = np.hstack(parts)
    block_dims = [K.shape[1] for K in parts]
    decomposition = ModuleDecomposition(
        summands, Q, block_dims, block_residual(rep.matrices, Q, block_dims)
    )
    if decomposition.total_dim() != rep.dim:
        raise DegenerateRepresentationError("summand dimensions do not add up to the module dimension")
    return decomposition


def decompose_regular(
    algebra: PreBialgebra,
    catalog: list[Representation] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> ModuleDecomposition:
    """Regular module as a sum of projective indecomposables A.E_a."""
    reg = regular_representation(algebra, tol)
    parts = _split_regular(algebra, tol, seed).parts
    return _group_parts(reg, parts, catalog or [], tol, seed, prefix="P_")


def decompose_module(
    rep: Representation,
    catalog: list[Representation] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> ModuleDecomposition:
    """Indecomposable summands of ``rep``, named after the first isomorphic catalog entry."""
    parts = split_module(rep.matrices, seed=seed, tol=tol)
    return _group_parts(rep, parts, catalog or [], tol, seed, prefix="M_")


def radical_submodule(rep: Representation, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of rad(A).P inside the module."""
    rad = radical(rep.algebra, tol)
    if len(rad) == 0:
        return np.zeros((rep.dim, 0), dtype=complex)
    images = np.hstack([rep(x) for x in rad])
    return orth(images, rcond=tol)


def simple_quotient(rep: Representation, tol: float = DEFAULT_TOL) -> Representation:
    """P / rad(A).P, acting on the orthogonal complement of the radical part."""
    W = radical_submodule(rep, tol)
    if W.shape[1] == rep.dim:
        raise DegenerateRepresentationError("module equals its radical part; the quotient is zero")
    Q = null_space(W.conj().T) if W.shape[1] else np.eye(rep.dim, dtype=complex)
    mats = np.einsum("ai,kij,jb->kab", Q.conj().T, rep.matrices, Q)
    return Representation(rep.algebra, mats, name=f"{rep.name}/rad" if rep.name else "")


def radical_part(rep: Representation, tol: float = DEFAULT_TOL) -> Representation | None:
    W = radical_submodule(rep, tol)
    if W.shape[1] == 0:
        return None
    mats = np.einsum("ai,kij,jb->kab", W.conj().T, rep.matrices, W)
    return Representation(rep.algebra, mats, name=f"rad({rep.name})" if rep.name else "")


@dataclass
class WedderburnData:
    block_sizes: list[int]
    central_idempotents: list[np.ndarray]
    irreps: list[Representation]


def wedderburn(algebra: PreBialgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> WedderburnData:
    """Matrix blocks, central primitive idempotents and irreps of a semisimple algebra."""
    rad = radical(algebra, tol)
    if len(rad):
        raise NotSemisimpleError(f"radical has dimension {len(rad)}")
    reg = regular_representation(algebra, tol)
    splitting = _split_regular(algebra, tol, seed)
    irreps: list[Representation] = []
    central: list[np.ndarray] = []
    for K, E in zip(splitting.parts, splitting.idempotents, strict=True):
        piece = reg.restrict(K)
        for c, ref in enumerate(irreps):
            if ref.dim == piece.dim and module_isomorphic(piece, ref, tol, seed) is not None:
                central[c] = central[c] + E
                break
        else:
            irreps.append(replace(piece, name=f"phi_{len(irreps) + 1}", irreducible=True))
            central.append(E)
    blocks = [r.dim for r in irreps]
    logger.info(f"semisimple algebra of dimension {algebra.dim} with matrix blocks {blocks}")
    return WedderburnData(blocks, central, irreps)


# tensor products and fusion


def tensor_representation(
    rho1: Representation, rho2: Representation, coalgebra: PreBialgebra | None = None, name: str = ""
) -> Representation:
    """(rho1 (x) rho2) o Delta.

    Over an algebra with an adjoined unit, ``coalgebra`` supplies Delta on the
    original basis and the adjoined unit acts as the identity.
    """
    algebra = rho1.algebra
    coalgebra = coalgebra or algebra
    if coalgebra.delta is None:
        raise PreconditionError("tensor products need a comultiplication")
    m1, m2 = rho1.matrices, rho2.matrices
    if algebra.adjoined_unit:
        m1, m2 = m1[1:], m2[1:]
    if coalgebra.dim != len(m1):
        raise ShapeError(f"comultiplication has dimension {coalgebra.dim}, representations {len(m1)}")
    mats = np.einsum("kij,iab,jcd->kacbd", coalgebra.delta, m1, m2, optimize=True)
    d = rho1.dim * rho2.dim
    mats = mats.reshape(len(m1), d, d)
    if algebra.adjoined_unit:
        mats = np.concatenate([np.eye(d, dtype=complex)[None], mats])
    return Representation(algebra, mats, name=name or f"{rho1.name}x{rho2.name}")


@dataclass(frozen=True, eq=False)
class FusionRing:
    """Fusion coefficients N[a, b, c] = N^c_{ab}."""

    labels: tuple[str, ...]
    N: np.ndarray

    def __post_init__(self):
        N = np.asarray(self.N, dtype=int)
        r = len(self.labels)
        if N.shape != (r, r, r):
            raise ShapeError(f"fusion coefficients must be ({r}, {r}, {r}), got {N.shape}")
        if N.min(initial=0) < 0:
            raise ShapeError("fusion coefficients must be non-negative")
        object.__setattr__(self, "N", N)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def left(self, a: int) -> np.ndarray:
        """(N_a)[c, b] = N^c_{ab}."""
        return self.N[a].T

    def right(self, a: int) -> np.ndarray:
        """(N~_a)[c, b] = N^c_{ba}."""
        return self.N[:, a, :].T

    def quantum_dims(self) -> np.ndarray:
        return np.array([max(abs(np.linalg.eigvals(self.left(a)))) for a in range(self.rank)])

    def fpdim(self) -> float:
        return float(np.sum(self.quantum_dims() ** 2))

    def associativity_defect(self) -> int:
        worst = 0
        for a in range(self.rank):
            for b in range(self.rank):
                lhs = self.left(a) @ self.left(b)
                rhs = sum(self.N[a, b, c] * self.left(c) for c in range(self.rank))
                worst = max(worst, int(np.abs(lhs - rhs).max()))
        return worst

    def commutation_defect(self) -> int:
        worst = 0
        for a in range(self.rank):
            for c in range(self.rank):
                diff = self.right(c) @ self.left(a) - self.left(a) @ self.right(c)
                worst = max(worst, int(np.abs(diff).max()))
        return worst

    def graph(self) -> nx.DiGraph:
        """Edge a -> c whenever c appears in some a x b."""
        g = nx.DiGraph()
        g.add_nodes_from(self.labels)
        for a, b, c in zip(*np.nonzero(self.N), strict=True):
            g.add_edge(self.labels[a], self.labels[c], via=self.labels[b])
        return g

    def is_transitive(self) -> bool:
        return nx.is_strongly_connected(self.graph())


def fusion_multiplicities(
    irreps: list[Representation],
    central_idempotents: list[np.ndarray],
    coalgebra: PreBialgebra | None = None,
) -> FusionRing:
    """N^c_{ab} = tr rho_{a x b}(z_c) / dim(phi_c)."""
    r = len(irreps)
    N = np.zeros((r, r, r), dtype=int)
    for a in range(r):
        for b in range(r):
            prod = tensor_representation(irreps[a], irreps[b], coalgebra)
            for c in range(r):
                value = np.trace(prod(central_idempotents[c])).real / irreps[c].dim
                count = round(value)
                if abs(value - count) > INTEGRALITY_TOL:
                    raise InconsistentCoproductError(
                        f"multiplicity of {irreps[c].name} in {irreps[a].name} x {irreps[b].name} is {value:.6f}"
                    )
                N[a, b, c] = count
    return FusionRing(tuple(rep.name for rep in irreps), N)


def build_catalog(
    algebra: PreBialgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> tuple[list[Representation], list[Representation]]:
    """Simple modules S_i and projective indecomposables P_i of a unital algebra.

    S_i = P_i / rad(P_i); the combined identification order is simples first.
    """
    regular = decompose_regular(algebra, tol=tol, seed=seed)
    projectives, simples = [], []
    for i, s in enumerate(regular.summands):
        projectives.append(replace(s.representation, name=f"P_{i}"))
        simples.append(replace(simple_quotient(s.representation, tol), name=f"S_{i}"))
    return simples, projectives


def fusion_table(
    catalog: list[Representation],
    coalgebra: PreBialgebra,
    labels: list[str] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> dict[tuple[str, str], dict[str, int]]:
    """Decomposition of every tensor product of the named catalog modules."""
    chosen = [rep for rep in catalog if labels is None or rep.name in labels]
    table = {}
    for rho1 in chosen:
        for rho2 in chosen:
            prod = tensor_representation(rho1, rho2, coalgebra)
            table[(rho1.name, rho2.name)] = decompose_module(prod, catalog, tol, seed).multiplicities()
    return table


def semisimplify(table: dict[tuple[str, str], dict[str, int]], keep: list[str]) -> FusionRing:
    """Fusion ring on ``keep``, discarding every other summand as negligible."""
    index = {label: i for i, label in enumerate(keep)}
    N = np.zeros((len(keep),) * 3, dtype=int)
    for (a, b), counts in table.items():
        if a in index and b in index:
            for c, m in counts.items():
                if c in index:
                    N[index[a], index[b], index[c]] = m
    return FusionRing(tuple(keep), N)
