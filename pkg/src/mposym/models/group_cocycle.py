"""MPO symmetries of a finite group twisted by a 3-cocycle, and their pre-bialgebras.

For a normalized 3-cocycle w on G, the tensors A_g^{gh,h} = w_g |h><h| with
w_g[k, l] = w(g, k, k^-1 l) close into an anomalous representation of G.
The algebra basis is b_g^{k,h} = w_g[k, h] |gk, gh><k, h|, indexed
I = g |G|^2 + k |G| + h.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from mposym.algebra.mpo_algebra import (
    FusionSolution,
    MpoFamily,
    associator,
    coboundary_values,
    cocycle_class,
    cocycle_residual,
    complete_fusion,
    fusion_residual,
)
from mposym.algebra.prebialgebra import (
    PreBialgebra,
    WeakHopfData,
    change_basis,
    check_axioms,
    check_weak_hopf,
    find_counit,
)
from mposym.algebra.rep_theory import Representation
from mposym.config import DEFAULT_CAP, DEFAULT_TOL
from mposym.core.tensor import MpoTensor, mpo_close
from mposym.errors import NotACocycleError, ParameterError, PreconditionError, ShapeError
from mposym.groups import FiniteGroup
from mposym.models.czy import czy_algebra, czy_family

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ThreeCocycle:
    group: FiniteGroup
    values: np.ndarray
    name: str = ""
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        n = self.group.order
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (n, n, n):
            raise ShapeError(f"cocycle on a group of order {n} needs shape {(n, n, n)}, got {values.shape}")
        if np.abs(np.abs(values) - 1).max() > self.tol:
            raise NotACocycleError("cocycle values must be phases")
        residual = cocycle_residual(values, self.group)
        if residual > self.tol:
            raise NotACocycleError(f"{self.name or 'omega'} violates the 3-cocycle identity (residual {residual:.3e})")
        object.__setattr__(self, "values", values)

    def __call__(self, g: int, h: int, k: int) -> complex:
        return complex(self.values[g, h, k])

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def normalized(self) -> bool:
        v = self.values
        return bool(
            np.allclose(v[0], 1, atol=self.tol)
            and np.allclose(v[:, 0], 1, atol=self.tol)
            and np.allclose(v[:, :, 0], 1, atol=self.tol)
        )

    def slice_matrix(self, g: int) -> np.ndarray:
        """w_g[k, l] = w(g, k, k^-1 l)."""
        G = self.group
        n = G.order
        return np.array([[self.values[g, k, G.mul(G.inv(k), q)] for q in range(n)] for k in range(n)])

    def cohomology_class(self) -> tuple[str, int]:
        return cocycle_class(self.values, self.group, self.tol)


def trivial_cocycle(group: FiniteGroup) -> ThreeCocycle:
    n = group.order
    return ThreeCocycle(group, np.ones((n, n, n), dtype=complex), name="trivial")


def cyclic_cocycle(n: int, p: int) -> ThreeCocycle:
    """Representative w(a, b, c) = exp(2 pi i p a (b + c - [b + c]) / n^2) of class p in H^3(Z_n, U(1))."""
    if n < 1:
        raise ParameterError(f"group order must be positive, got {n}")
    a, b, c = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    carry = b + c - (b + c) % n
    values = np.exp(2j * np.pi * (p % n) * a * carry / n**2)
    return ThreeCocycle(FiniteGroup.cyclic(n), values, name=f"Z{n}_p{p % n}")


def z2_nontrivial() -> ThreeCocycle:
    """w(1, 1, 1) = -1, all other values 1."""
    return cyclic_cocycle(2, 1)


def coboundary(group: FiniteGroup, beta: np.ndarray) -> ThreeCocycle:
    """d beta(g, h, k) = beta(h, k) beta(g, hk) / (beta(gh, k) beta(g, h))."""
    n = group.order
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (n, n):
        raise ShapeError(f"2-cochain must have shape {(n, n)}, got {beta.shape}")
    return ThreeCocycle(group, coboundary_values(beta, group), name="coboundary")


def twisted(omega: ThreeCocycle, beta: np.ndarray) -> ThreeCocycle:
    """omega times the coboundary of beta; same cohomology class."""
    d = coboundary(omega.group, beta)
    return ThreeCocycle(omega.group, omega.values * d.values, name=f"{omega.name}*d(beta)")


@dataclass
class GroupMpo:
    cocycle: ThreeCocycle
    family: MpoFamily
    injective: dict[int, bool]


def group_cocycle_mpo(omega: ThreeCocycle, tol: float = DEFAULT_TOL) -> GroupMpo:
    """Tensors A_g with physical and bond dimension |G|; A_g is injective after two sites iff w_g is invertible."""
    G = omega.group
    n = G.order
    tensors = {}
    injective = {}
    for g in range(n):
        w = omega.slice_matrix(g)
        data = np.zeros((n, n, n, n), dtype=complex)
        for h in range(n):
            data[G.mul(g, h), h, :, h] = w[:, h]
        tensors[g] = MpoTensor(data, name=f"A_{g}")
        s = np.linalg.svd(w, compute_uv=False)
        injective[g] = bool(s[-1] > tol * max(1.0, s[0]))
    boundary = {g: [(m, q) for m in range(n) for q in range(n)] for g in range(n)}
    family = MpoFamily(G, tensors, boundary, name=omega.name or "group")
    logger.debug(f"group MPO family {family.name}: injective sectors {[g for g, ok in injective.items() if ok]}")
    return GroupMpo(omega, family, injective)


def group_operator(mpo: GroupMpo, g: int, n_sites: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """O_g on a ring of N sites."""
    A = mpo.family.tensors[g]
    return mpo_close(A, np.eye(A.bond), n_sites, cap).matrix


def group_law_residual(mpo: GroupMpo, n_sites: int, cap: int = DEFAULT_CAP) -> float:
    """max over g, h of |O_g O_h - O_gh|."""
    G = mpo.cocycle.group
    ops = [group_operator(mpo, g, n_sites, cap) for g in range(G.order)]
    return max(
        float(np.abs(ops[g] @ ops[h] - ops[G.mul(g, h)]).max()) for g in range(G.order) for h in range(G.order)
    )


def group_fusions(mpo: GroupMpo, tol: float = DEFAULT_TOL) -> dict[tuple[int, int], FusionSolution]:
    """Y_{g,h} = sum_x w(g, h, x) |x><hx, x|; the associator of these is w itself."""
    omega = mpo.cocycle
    G = omega.group
    n = G.order
    tensors = mpo.family.tensors
    out = {}
    for g in range(n):
        for h in range(n):
            gh = G.mul(g, h)
            Y = np.zeros((n, n * n), dtype=complex)
            for x in range(n):
                Y[x, G.mul(h, x) * n + x] = omega(g, h, x)
            R = Y.conj().T
            X, X_inv = complete_fusion(Y, R)
            residual = fusion_residual(Y, tensors[g], tensors[h], tensors[gh])
            out[(g, h)] = FusionSolution(g, h, gh, Y, R, X, X_inv, hinted=True, residual=residual)
    worst = max(sol.residual for sol in out.values())
    if worst > tol:
        logger.warning(f"analytic fusion tensors intertwine only to {worst:.3e}")
    return out


def _index(n: int, g: int, k: int, h: int) -> int:
    return (g * n + k) * n + h


@dataclass
class GroupPreBialgebras:
    """A with the growing coproduct Delta, A with the boundary coproduct Delta^, and Delta^'s weak Hopf data."""

    cocycle: ThreeCocycle
    growing: PreBialgebra
    boundary: PreBialgebra
    hopf: WeakHopfData
    operators: np.ndarray


def two_site_operators(omega: ThreeCocycle) -> np.ndarray:
    """b_g^{k,h} -> w_g[k, h] |gk, gh><k, h| on two sites."""
    G = omega.group
    n = G.order
    ops = np.zeros((n**3, n * n, n * n), dtype=complex)
    for g in range(n):
        w = omega.slice_matrix(g)
        for k in range(n):
            for h in range(n):
                ops[_index(n, g, k, h), G.mul(g, k) * n + G.mul(g, h), k * n + h] = w[k, h]
    return ops


def group_prebialgebra(omega: ThreeCocycle) -> GroupPreBialgebras:
    if not omega.normalized:
        raise PreconditionError("the group pre-bialgebra needs a normalized 3-cocycle")
    G = omega.group
    n = G.order
    dim = n**3
    w = [omega.slice_matrix(g) for g in range(n)]
    lam = np.zeros((dim,) * 3, dtype=complex)
    delta = np.zeros((dim,) * 3, dtype=complex)
    delta_hat = np.zeros((dim,) * 3, dtype=complex)
    unit = np.zeros(dim, dtype=complex)
    counit = np.zeros(dim, dtype=complex)
    antipode = np.zeros((dim, dim), dtype=complex)
    star = np.zeros((dim, dim), dtype=complex)

    for g in range(n):
        gi = G.inv(g)
        for k in range(n):
            for h in range(n):
                I = _index(n, g, k, h)
                gk, gh = G.mul(g, k), G.mul(g, h)
                for p in range(n):
                    # b_g^{k,h} b_p^{k',h'} is nonzero only for k = p k', h = p h'
                    kp, hp = G.mul(G.inv(p), k), G.mul(G.inv(p), h)
                    gp = G.mul(g, p)
                    coeff = w[g][k, h] * w[p][kp, hp] / w[gp][kp, hp]
                    lam[I, _index(n, p, kp, hp), _index(n, gp, kp, hp)] = coeff
                for q in range(n):
                    delta_hat[I, _index(n, g, k, q), _index(n, g, q, h)] = 1.0
                    for m in range(n):
                        delta[I, _index(n, g, k, q), _index(n, g, m, h)] = w[g][q, m]
                counit[I] = float(k == h)
                antipode[_index(n, gi, gh, gk), I] = 1.0 / (w[g][h, k] * w[gi][gh, gk])
                star[_index(n, gi, gk, gh), I] = np.conj(w[g][k, h]) / w[gi][gk, gh]
        if g == 0:
            for k in range(n):
                for h in range(n):
                    unit[_index(n, 0, k, h)] = 1.0

    labels = tuple(f"b_{g}^{k}{h}" for g in range(n) for k in range(n) for h in range(n))
    growing = PreBialgebra(lam=lam, delta=delta, labels=labels, unit=unit, star=star)
    boundary = PreBialgebra(lam=lam, delta=delta_hat, labels=labels, unit=unit, counit=counit, star=star)
    logger.debug(f"group pre-bialgebras of dimension {dim} for cocycle {omega.name}")
    return GroupPreBialgebras(omega, growing, boundary, WeakHopfData(counit, antipode), two_site_operators(omega))


def single_site_representation(algebras: GroupPreBialgebras) -> Representation:
    """phi(b_g^{k,h}) = delta_{kh} |gh><h|."""
    G = algebras.cocycle.group
    n = G.order
    mats = np.zeros((n**3, n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            mats[_index(n, g, h, h), G.mul(g, h), h] = 1.0
    return Representation(algebras.growing, mats, name="single_site")


def operator_representation(algebras: GroupPreBialgebras, boundary: bool = True) -> Representation:
    """The faithful two-site realization, a *-representation."""
    algebra = algebras.boundary if boundary else algebras.growing
    return Representation(algebra, algebras.operators, name="two_site", faithful=True)


def grown_images(rep: Representation, n_factors: int) -> np.ndarray:
    """rep^{(x)N} Delta^{N-1}(e_I) for every basis element."""
    delta = rep.algebra.delta
    if delta is None:
        raise PreconditionError("growing the representation needs a comultiplication")
    out = rep.matrices
    for _ in range(n_factors - 1):
        d = out.shape[1]
        out = np.einsum("ijk,jab,kcd->iacbd", delta, out, rep.matrices).reshape(len(delta), d * rep.dim, d * rep.dim)
    return out


@dataclass
class IsomorphismReport:
    basis_change: np.ndarray
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())


def czy_isomorphism(
    lengths: tuple[int, ...] = (2, 3, 4), tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> IsomorphismReport:
    """Compare the Z_2 pre-bialgebra with the main CZY algebra through b_K = sum_J R[K, J] e_J.

    R is read off the two-site operators; the comparison then covers the
    structure constants and the grown operators on N sites.
    """
    algebras = group_prebialgebra(z2_nontrivial())
    family = czy_family()
    czy_ops = family.closed_basis(2, cap)
    V = czy_ops.reshape(len(czy_ops), -1).T
    R, *_ = np.linalg.lstsq(V, algebras.operators.reshape(len(algebras.operators), -1).T, rcond=None)
    R = R.T
    report = IsomorphismReport(R, tol=tol)
    rebuilt = np.einsum("kj,jab->kab", R, czy_ops)
    report.residuals["operator_span"] = float(np.abs(rebuilt - algebras.operators).max())
    transported = change_basis(czy_algebra(), R)
    report.residuals["multiplication"] = float(np.abs(transported.lam - algebras.growing.lam).max())
    report.residuals["comultiplication"] = float(np.abs(transported.delta - algebras.growing.delta).max())
    phi = single_site_representation(algebras)
    for n_sites in lengths:
        grown = grown_images(phi, n_sites)
        closed = np.einsum("kj,jab->kab", R, family.closed_basis(n_sites, cap))
        report.residuals[f"growth_{n_sites}"] = float(np.abs(grown - closed).max())
    logger.info(f"Z_2 group algebra vs CZY: {report.residuals}")
    return report


@dataclass
class GroupReport:
    cocycle: str
    injective: dict[int, bool]
    cohomology_class: tuple[str, int]
    associator_class: tuple[str, int]
    residuals: dict[str, float] = field(default_factory=dict)
    counit_found: bool = False
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return self.cohomology_class == self.associator_class and all(r <= self.tol for r in self.residuals.values())


def analyze_cocycle(
    omega: ThreeCocycle, max_sites: int = 4, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> GroupReport:
    """Group law, anomaly and pre-bialgebra checks for one cocycle."""
    mpo = group_cocycle_mpo(omega, tol)
    table = associator(mpo.family, group_fusions(mpo, tol), tol)
    report = GroupReport(
        cocycle=omega.name,
        injective=mpo.injective,
        cohomology_class=omega.cohomology_class(),
        associator_class=(table.cohomology_class, table.class_index),
        tol=tol,
    )
    report.residuals["associator_matches_cocycle"] = float(np.abs(table.as_array(omega.order) - omega.values).max())
    for n_sites in range(2, max_sites + 1):
        report.residuals[f"group_law_{n_sites}"] = group_law_residual(mpo, n_sites, cap)
    if omega.normalized:
        algebras = group_prebialgebra(omega)
        axioms = check_axioms(algebras.growing, tol)
        report.residuals.update({f"growing_{k}": v for k, v in axioms.residuals.items()})
        report.counit_found = find_counit(algebras.growing, tol) is not None
        hopf = check_weak_hopf(algebras.boundary, algebras.hopf, tol)
        report.residuals.update({f"boundary_{k}": v for k, v in hopf.residuals.items()})
    return report


def onsite_family(group: FiniteGroup, unitaries: list[np.ndarray], name: str = "onsite") -> MpoFamily:
    """Bond-one MPOs U_g^{(x)N} of an on-site representation."""
    if len(unitaries) != group.order:
        raise ShapeError(f"expected {group.order} matrices, got {len(unitaries)}")
    tensors = {}
    for g, U in enumerate(unitaries):
        U = np.asarray(U, dtype=complex)
        tensors[g] = MpoTensor(U.reshape(*U.shape, 1, 1), name=f"U_{g}")
    return MpoFamily(group, tensors, {g: [(0, 0)] for g in range(group.order)}, name=name)
