"""Fusion tensors, associators and structure constants of MPO families.

A family assigns an MPO tensor A_a to every group element a. Stacking A_a on
top of A_b gives a tensor that reduces to A_{ab} through fusion tensors
Y_{a,b} with Y (sum_j A_a^{ij} (x) A_b^{jk}) = A_{ab}^{ik} Y.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from mposym.algebra.prebialgebra import PreBialgebra
from mposym.config import DEFAULT_CAP, DEFAULT_TOL
from mposym.core.tensor import MpoTensor, boundary_unit, mpo_close, mpo_vertical_product
from mposym.errors import (
    ExtractionInconsistencyError,
    InconsistentFusionError,
    MaskError,
    NoFusionError,
    NotACocycleError,
    RankDeficientError,
    ShapeError,
)
from mposym.groups import FiniteGroup

logger = logging.getLogger(__name__)

RANK_ATTEMPTS = 5


@dataclass(frozen=True, eq=False)
class MpoFamily:
    group: FiniteGroup
    tensors: dict[int, MpoTensor]
    boundary: dict[int, list[tuple[int, int]]]
    name: str = ""

    def __post_init__(self):
        if sorted(self.tensors) != list(range(self.group.order)):
            raise ShapeError("family needs exactly one tensor per group element")
        for a, pairs in self.boundary.items():
            bond = self.tensors[a].bond
            for m, n in pairs:
                if not (0 <= m < bond and 0 <= n < bond):
                    raise ShapeError(f"boundary pair ({m},{n}) outside bond {bond} of sector {a}")

    @property
    def basis(self) -> list[tuple[int, int, int]]:
        """Algebra basis labels (a, m, n), ordered by sector then as listed."""
        return [(a, m, n) for a in sorted(self.boundary) for (m, n) in self.boundary[a]]

    def index(self, a: int, m: int, n: int) -> int:
        return self.basis.index((a, m, n))

    def closed_basis(self, n_sites: int, cap: int = DEFAULT_CAP) -> np.ndarray:
        """Closed operators O^(N)(e_a^{mn}) for the whole basis, shape (n_basis, d^N, d^N)."""
        return np.stack(
            [
                mpo_close(self.tensors[a], boundary_unit(self.tensors[a].bond, m, n), n_sites, cap).matrix
                for a, m, n in self.basis
            ]
        )

    def is_faithful(self, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> bool:
        ops = self.closed_basis(2, cap).reshape(len(self.basis), -1)
        return int(np.linalg.matrix_rank(ops, tol=tol * max(1.0, np.abs(ops).max()))) == len(self.basis)


@dataclass(frozen=True, eq=False)
class FusionSolution:
    a: int
    b: int
    c: int
    Y: np.ndarray
    Y_rinv: np.ndarray
    X: np.ndarray | None = None
    X_inv: np.ndarray | None = None
    hinted: bool = False
    intertwiner_dim: int = 1
    residual: float = 0.0


@dataclass
class AssociatorTable:
    omega: dict[tuple[int, int, int], complex]
    residuals: dict[tuple[int, int, int], float] = field(default_factory=dict)
    cohomology_class: str = "unknown"
    class_index: int = -1
    # normalized unit-modulus representative of the same class
    normalized: dict[tuple[int, int, int], complex] = field(default_factory=dict)

    def as_array(self, order: int, normalized: bool = False) -> np.ndarray:
        out = np.ones((order, order, order), dtype=complex)
        for (a, b, c), w in (self.normalized if normalized else self.omega).items():
            out[a, b, c] = w
        return out


def _stacked_slices(A_a: MpoTensor, A_b: MpoTensor) -> np.ndarray:
    """Slices (i, k) of the stacked tensor, shape (d_out, d_in, D_ab, D_ab)."""
    return mpo_vertical_product(A_a, A_b).data


def _left_system(T: np.ndarray, A_c: np.ndarray) -> np.ndarray:
    """Linear map vec(Y) -> {Y T^{ik} - A_c^{ik} Y} in row-major vec."""
    d_out, d_in, Dab, _ = T.shape
    Dc = A_c.shape[2]
    blocks = [
        np.kron(np.eye(Dc), T[i, k].T) - np.kron(A_c[i, k], np.eye(Dab))
        for i in range(d_out)
        for k in range(d_in)
    ]
    return np.vstack(blocks)


def _right_system(T: np.ndarray, A_c: np.ndarray) -> np.ndarray:
    """Linear map vec(R) -> {T^{ik} R - R A_c^{ik}} in row-major vec."""
    d_out, d_in, Dab, _ = T.shape
    Dc = A_c.shape[2]
    blocks = [
        np.kron(T[i, k], np.eye(Dc)) - np.kron(np.eye(Dab), A_c[i, k].T)
        for i in range(d_out)
        for k in range(d_in)
    ]
    return np.vstack(blocks)


def fusion_residual(Y: np.ndarray, A_a: MpoTensor, A_b: MpoTensor, A_c: MpoTensor) -> float:
    """max_{ik} |Y T^{ik} - A_c^{ik} Y| for the stacked tensor T of A_a over A_b."""
    T = _stacked_slices(A_a, A_b)
    lhs = np.einsum("xa,ikab->ikxb", Y, T)
    rhs = np.einsum("ikxy,yb->ikxb", A_c.data, Y)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def complete_fusion(Y: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invertible X whose leading rows are Y and whose inverse has leading columns R."""
    W = null_space(R.T).T
    X = np.vstack([Y, W]) if W.size else Y.copy()
    return X, np.linalg.inv(X)


def _fix_gauge(Y: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scale = np.linalg.norm(Y)
    flat = Y.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    s = np.conj(pivot) / abs(pivot) / scale
    return s * Y, R / s


def solve_fusion(
    A_a: MpoTensor,
    A_b: MpoTensor,
    A_c: MpoTensor,
    *,
    a: int = 0,
    b: int = 0,
    c: int = 0,
    hint_X: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> FusionSolution:
    """Fusion tensor Y_{a,b} with a right inverse, from a hint X or from the intertwiner space."""
    if A_a.d_in != A_b.d_out or A_c.d_out != A_a.d_out or A_c.d_in != A_b.d_in:
        raise ShapeError("physical dimensions of the fusion triple do not match")
    Dab = A_a.bond * A_b.bond
    Dc = A_c.bond
    if Dc > Dab:
        raise NoFusionError(f"target bond {Dc} exceeds stacked bond {Dab}")

    if hint_X is not None:
        X = np.asarray(hint_X, dtype=complex)
        if X.shape != (Dab, Dab):
            raise ShapeError(f"hint X must be {Dab}x{Dab}, got {X.shape}")
        X_inv = np.linalg.inv(X)
        Y, R = X[:Dc], X_inv[:, :Dc]
        residual = fusion_residual(Y, A_a, A_b, A_c)
        if residual > tol:
            raise InconsistentFusionError(f"hint X_({a},{b}) does not intertwine (residual {residual:.3e})")
        return FusionSolution(a, b, c, Y, R, X, X_inv, hinted=True, residual=residual)

    T = _stacked_slices(A_a, A_b)
    left = null_space(_left_system(T, A_c.data), rcond=tol)
    if left.shape[1] == 0:
        raise NoFusionError(f"no intertwiner from A_{a} x A_{b} to A_{c}")
    if left.shape[1] > 1:
        logger.warning(
            f"fusion tensor ({a},{b}) is not unique (intertwiner space dim {left.shape[1]}); "
            "supply a hint for a reproducible gauge"
        )
    rng = np.random.default_rng(seed)
    for _ in range(RANK_ATTEMPTS):
        coeffs = rng.normal(size=left.shape[1]) + 1j * rng.normal(size=left.shape[1])
        Y = (left @ coeffs).reshape(Dc, Dab)
        if np.linalg.matrix_rank(Y, tol=tol * np.abs(Y).max()) == Dc:
            break
    else:
        raise RankDeficientError(f"no full-row-rank fusion tensor for ({a},{b})")

    right = null_space(_right_system(T, A_c.data), rcond=tol)
    R = None
    if right.shape[1]:
        # solve Y R = 1 inside the right-intertwiner space
        system = np.stack([(Y @ right[:, k].reshape(Dab, Dc)).reshape(-1) for k in range(right.shape[1])], axis=1)
        coeffs, *_ = np.linalg.lstsq(system, np.eye(Dc).reshape(-1), rcond=None)
        candidate = (right @ coeffs).reshape(Dab, Dc)
        if np.max(np.abs(Y @ candidate - np.eye(Dc))) <= tol * 100:
            R = candidate
    if R is None:
        logger.warning(f"no intertwining right inverse for ({a},{b}); falling back to the pseudo-inverse")
        R = np.linalg.pinv(Y)
    Y, R = _fix_gauge(Y, R)
    X, X_inv = complete_fusion(Y, R)
    residual = fusion_residual(Y, A_a, A_b, A_c)
    logger.debug(f"solved fusion ({a},{b})->{c}: residual {residual:.3e}")
    return FusionSolution(
        a, b, c, Y, R, X, X_inv, hinted=False, intertwiner_dim=left.shape[1], residual=residual
    )


def solve_family_fusions(
    family: MpoFamily,
    hints: dict[tuple[int, int], np.ndarray] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> dict[tuple[int, int], FusionSolution]:
    hints = hints or {}
    G = family.group
    fusions = {}
    for a in range(G.order):
        for b in range(G.order):
            c = G.mul(a, b)
            fusions[(a, b)] = solve_fusion(
                family.tensors[a],
                family.tensors[b],
                family.tensors[c],
                a=a,
                b=b,
                c=c,
                hint_X=hints.get((a, b)),
                tol=tol,
                seed=seed,
            )
    return fusions


def coboundary_values(beta: np.ndarray, group: FiniteGroup) -> np.ndarray:
    """d beta(g, h, k) = beta(h, k) beta(g, hk) / (beta(gh, k) beta(g, h))."""
    t = group.mult
    g, h, k = np.meshgrid(*(np.arange(group.order),) * 3, indexing="ij")
    return beta[h, k] * beta[g, t[h, k]] / (beta[t[g, h], k] * beta[g, h])


def normalize_cocycle(omega: np.ndarray, group: FiniteGroup, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Cohomologous cocycle equal to 1 whenever an argument is the identity, with unit-modulus values.

    Fusion tensors fix omega only up to the coboundary of their scales, which
    need not be phases.
    """
    omega = np.asarray(omega, dtype=complex)
    n = group.order
    beta = np.ones((n, n), dtype=complex)
    beta[0, :] = omega[0, 0, :]
    beta[1:, 0] = 1 / omega[1:, 0, 0]
    normalized = omega / coboundary_values(beta, group)

    # log|omega| is a real cocycle, hence a coboundary; fit it with a cochain vanishing on the identity
    pairs = [(a, b) for a in range(1, n) for b in range(1, n)]
    if pairs:
        t = group.mult
        column = {pair: i for i, pair in enumerate(pairs)}
        system = np.zeros((n**3, len(pairs)))
        for row, (g, h, k) in enumerate(np.ndindex(n, n, n)):
            for sign, pair in ((1, (h, k)), (1, (g, t[h, k])), (-1, (t[g, h], k)), (-1, (g, h))):
                if pair in column:
                    system[row, column[pair]] += sign
        target = np.log(np.abs(normalized)).reshape(-1)
        gamma, *_ = np.linalg.lstsq(system, target, rcond=None)
        misfit = float(np.abs(system @ gamma - target).max())
        if misfit > np.sqrt(tol):
            logger.warning(f"modulus of the associator is not a coboundary (misfit {misfit:.3e})")
        scale = np.ones((n, n))
        for pair, i in column.items():
            scale[pair] = np.exp(gamma[i])
        normalized = normalized / coboundary_values(scale, group)
    return normalized


def _triple_stack(family: MpoFamily, a: int, b: int, c: int) -> np.ndarray:
    """Slices of A_a over A_b over A_c, bonds ordered (a, b, c)."""
    t = family.tensors
    return mpo_vertical_product(mpo_vertical_product(t[a], t[b]), t[c]).data


def associator(
    family: MpoFamily, fusions: dict[tuple[int, int], FusionSolution], tol: float = DEFAULT_TOL
) -> AssociatorTable:
    """omega(a,b,c) with Y_{ab,c}(Y_{a,b} (x) 1) = omega Y_{a,bc}(1 (x) Y_{b,c}), plus its class.

    The two chains are compared after contraction with the stacked tensor
    A_a A_b A_c. Fusion tensors into a non-injective sector are only fixed on
    that support; for injective targets this is the bare matrix identity.
    """
    G = family.group
    table = AssociatorTable(omega={})
    for a in range(G.order):
        for b in range(G.order):
            for c in range(G.order):
                Da, Dc = family.tensors[a].bond, family.tensors[c].bond
                ab, bc = G.mul(a, b), G.mul(b, c)
                L = fusions[(ab, c)].Y @ np.kron(fusions[(a, b)].Y, np.eye(Dc))
                R = fusions[(a, bc)].Y @ np.kron(np.eye(Da), fusions[(b, c)].Y)
                T = _triple_stack(family, a, b, c)
                L_on, R_on = np.einsum("xa,ikab->ikxb", L, T), np.einsum("xa,ikab->ikxb", R, T)
                norm = np.vdot(R_on, R_on).real
                if norm <= tol**2:
                    raise InconsistentFusionError(f"vanishing fusion chain at ({a},{b},{c})")
                w = np.vdot(R_on, L_on) / norm
                residual = float(np.linalg.norm(L_on - w * R_on) / np.sqrt(norm))
                if residual > tol:
                    raise InconsistentFusionError(
                        f"fusion chains at ({a},{b},{c}) are not proportional (residual {residual:.3e})"
                    )
                table.omega[(a, b, c)] = complex(w)
                table.residuals[(a, b, c)] = residual
    label, index = cocycle_class(table.as_array(G.order), G, tol)
    table.cohomology_class, table.class_index = label, index
    rep = normalize_cocycle(table.as_array(G.order), G, tol)
    table.normalized = {key: complex(rep[key]) for key in table.omega}
    return table


def cocycle_residual(omega: np.ndarray, group: FiniteGroup) -> float:
    """max |w(h,k,l) w(g,hk,l) w(g,h,k) - w(gh,k,l) w(g,h,kl)| over all quadruples."""
    t = group.mult
    n = group.order
    g, h, k, q = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
    lhs = omega[h, k, q] * omega[g, t[h, k], q] * omega[g, h, k]
    rhs = omega[t[g, h], k, q] * omega[g, h, t[k, q]]
    return float(np.max(np.abs(lhs - rhs)))


def _cyclic_generator(group: FiniteGroup) -> int | None:
    if not group.is_abelian():
        return None
    for g in range(group.order):
        x, seen = 0, 0
        while True:
            x = group.mul(x, g)
            seen += 1
            if x == 0:
                break
        if seen == group.order:
            return g
    return None


def cocycle_class(omega: np.ndarray, group: FiniteGroup, tol: float = DEFAULT_TOL) -> tuple[str, int]:
    """Class label and index p of omega in H^3(Z_n, U(1)) = Z_n.

    Uses the coboundary-invariant I = prod_j omega(g, g^j, g) for a generator g;
    I = exp(2 pi i p / n). Non-cyclic groups are reported as "unknown".
    """
    omega = np.asarray(omega, dtype=complex)
    residual = cocycle_residual(omega, group)
    if residual > tol * max(1.0, float(np.max(np.abs(omega))) ** 3):
        raise NotACocycleError(f"3-cocycle identity violated (residual {residual:.3e})")
    gen = _cyclic_generator(group)
    if gen is None:
        logger.warning("cohomology class is only computed for cyclic groups")
        return "unknown", -1
    n = group.order
    invariant = 1.0 + 0j
    power = 0
    for _ in range(n):
        invariant *= omega[gen, power, gen]
        power = group.mul(power, gen)
    p = int(round(n * np.angle(invariant) / (2 * np.pi))) % n
    mismatch = abs(invariant / abs(invariant) - np.exp(2j * np.pi * p / n))
    if mismatch > 1e-6:
        logger.warning(f"class invariant {invariant} is not an n-th root of unity (off by {mismatch:.2e})")
    return ("trivial" if p == 0 else "nontrivial"), p


def _coordinates(ops: np.ndarray, basis_ops: np.ndarray, tol: float, what: str) -> np.ndarray:
    """Expand operators ops[k] in the span of basis_ops[I] by least squares."""
    V = basis_ops.reshape(len(basis_ops), -1).T
    targets = ops.reshape(len(ops), -1).T
    coeffs, *_ = np.linalg.lstsq(V, targets, rcond=None)
    residual = float(np.max(np.abs(V @ coeffs - targets), initial=0.0))
    if residual > tol * max(1.0, float(np.abs(targets).max(initial=0.0))):
        raise ExtractionInconsistencyError(f"{what} leaves the span of the basis (residual {residual:.3e})")
    return coeffs.T


def _multiplication_by_operators(family: MpoFamily, tol: float, cap: int) -> np.ndarray:
    ops = family.closed_basis(2, cap)
    products = np.einsum("iab,jbc->ijac", ops, ops)
    n = len(ops)
    coeffs = _coordinates(products.reshape(n * n, *ops.shape[1:]), ops, tol, "operator product")
    return coeffs.reshape(n, n, n)


def _multiplication_by_fusion(
    family: MpoFamily, fusions: dict[tuple[int, int], FusionSolution], tol: float, cap: int
) -> np.ndarray:
    G = family.group
    basis = family.basis
    ops = family.closed_basis(2, cap)
    # coordinates of every boundary unit e_c^{rs}, valid or not
    unit_coords = {}
    for c in range(G.order):
        D = family.tensors[c].bond
        units = np.stack(
            [
                mpo_close(family.tensors[c], boundary_unit(D, r, s), 2, cap).matrix
                for r in range(D)
                for s in range(D)
            ]
        )
        unit_coords[c] = _coordinates(units, ops, tol, f"boundary unit of sector {c}").reshape(D, D, -1)

    n = len(basis)
    lam = np.zeros((n, n, n), dtype=complex)
    for I, (a, m, nn) in enumerate(basis):
        for J, (b, p, q) in enumerate(basis):
            c = G.mul(a, b)
            sol = fusions[(a, b)]
            B = np.kron(
                boundary_unit(family.tensors[a].bond, m, nn), boundary_unit(family.tensors[b].bond, p, q)
            )
            M = sol.Y @ B @ sol.Y_rinv
            # sum_{rs} M[s, r] e_c^{rs}
            lam[I, J] = np.einsum("sr,rsk->k", M, unit_coords[c])
    return lam


def extract_multiplication(
    family: MpoFamily,
    fusions: dict[tuple[int, int], FusionSolution] | None = None,
    method: str = "both",
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_CAP,
) -> np.ndarray:
    """Multiplication constants lam[I, J, K] of the family's algebra.

    ``method`` is "operators" (two-site operator products), "fusion" (fusion
    tensor formula) or "both", which cross-validates the two.
    """
    if method not in ("operators", "fusion", "both"):
        raise ValueError(f"unknown extraction method {method!r}")
    by_ops = _multiplication_by_operators(family, tol, cap) if method != "fusion" else None
    if method == "operators":
        return by_ops
    if fusions is None:
        raise ExtractionInconsistencyError("the fusion formula needs fusion solutions")
    by_fusion = _multiplication_by_fusion(family, fusions, tol, cap)
    if method == "fusion":
        return by_fusion
    gap = float(np.max(np.abs(by_ops - by_fusion)))
    if gap > tol:
        raise ExtractionInconsistencyError(f"fusion formula and operator products differ by {gap:.3e}")
    logger.debug(f"multiplication extraction methods agree to {gap:.3e}")
    return by_ops


def extract_comultiplication(
    family: MpoFamily, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP, lengths: tuple[int, ...] = (1, 2)
) -> np.ndarray:
    """Delta(e_a^{mn}) = sum_p e_a^{mp} (x) e_a^{pn} over valid pairs, verified by growing the MPO."""
    basis = family.basis
    index = {label: i for i, label in enumerate(basis)}
    n = len(basis)
    delta = np.zeros((n, n, n), dtype=complex)
    for I, (a, m, nn) in enumerate(basis):
        for p in range(family.tensors[a].bond):
            left, right = (a, m, p), (a, p, nn)
            if left in index and right in index:
                delta[I, index[left], index[right]] = 1.0

    for length in lengths:
        grown = family.closed_basis(2 * length, cap)
        half = family.closed_basis(length, cap)
        for I in range(n):
            rebuilt = sum(
                delta[I, J, K] * np.kron(half[J], half[K]) for J, K in zip(*np.nonzero(delta[I]), strict=True)
            )
            residual = float(np.max(np.abs(grown[I] - rebuilt)))
            if residual > tol:
                raise MaskError(
                    f"coproduct of {basis[I]} fails at {length}+{length} sites (residual {residual:.3e})"
                )
    return delta


def family_prebialgebra(
    family: MpoFamily,
    fusions: dict[tuple[int, int], FusionSolution] | None = None,
    method: str = "both",
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_CAP,
) -> PreBialgebra:
    lam = extract_multiplication(family, fusions, method=method, tol=tol, cap=cap)
    delta = extract_comultiplication(family, tol=tol, cap=cap)
    labels = tuple(f"e_{a}^{m + 1}{n + 1}" for a, m, n in family.basis)
    return PreBialgebra(lam=lam, delta=delta, labels=labels)
