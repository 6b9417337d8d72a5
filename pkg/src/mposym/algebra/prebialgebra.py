"""Pre-bialgebras as structure-constant tensors.

Conventions, for a basis {e_I} of dimension n:
    e_I e_J = sum_K lam[I, J, K] e_K
    Delta(e_I) = sum_{J,K} delta[I, J, K] e_J (x) e_K
    (sum_I x_I e_I)* = sum_J (star @ conj(x))_J e_J
    S(e_I) = sum_J antipode[J, I] e_J
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import null_space

from mposym.config import DEFAULT_TOL
from mposym.errors import DegenerateAlgebraError, InversionError, PreconditionError, ShapeError

logger = logging.getLogger(__name__)


def _maxabs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


@dataclass(frozen=True, eq=False)
class PreBialgebra:
    lam: np.ndarray
    delta: np.ndarray | None = None
    labels: tuple[str, ...] = ()
    unit: np.ndarray | None = None
    counit: np.ndarray | None = None
    star: np.ndarray | None = None
    adjoined_unit: bool = False

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=complex)
        n = lam.shape[0]
        if lam.shape != (n, n, n):
            raise ShapeError(f"multiplication constants must be (n, n, n), got {lam.shape}")
        object.__setattr__(self, "lam", lam)
        if self.delta is not None:
            delta = np.asarray(self.delta, dtype=complex)
            if delta.shape != (n, n, n):
                raise ShapeError(f"comultiplication constants must be (n, n, n), got {delta.shape}")
            object.__setattr__(self, "delta", delta)
        for name, shape in (("unit", (n,)), ("counit", (n,)), ("star", (n, n))):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value, dtype=complex)
                if value.shape != shape:
                    raise ShapeError(f"{name} must have shape {shape}, got {value.shape}")
                object.__setattr__(self, name, value)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(n)))
        elif len(self.labels) != n:
            raise ShapeError(f"expected {n} labels, got {len(self.labels)}")
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.lam.shape[0]

    def basis_vector(self, index: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[index] = 1.0
        return v

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.lam)

    def coproduct(self, x: np.ndarray) -> np.ndarray:
        """Coefficient matrix c[J, K] of Delta(x) = sum c[J, K] e_J (x) e_K."""
        if self.delta is None:
            raise PreconditionError("algebra carries no comultiplication")
        return np.einsum("i,ijk->jk", x, self.delta)

    def apply_star(self, x: np.ndarray) -> np.ndarray:
        if self.star is None:
            raise PreconditionError("algebra carries no star operation")
        return self.star @ np.conj(x)

    def left_regular(self) -> np.ndarray:
        """Matrices L(e_I) with L(e_I)[K, J] = lam[I, J, K]."""
        return np.transpose(self.lam, (0, 2, 1))

    def iterated_coproduct(self, x: np.ndarray, n_factors: int) -> np.ndarray:
        """Coefficients of Delta^(n_factors - 1)(x) as an n_factors-way tensor."""
        if n_factors < 1:
            raise ShapeError("need at least one tensor factor")
        out = np.asarray(x, dtype=complex)
        for _ in range(n_factors - 1):
            # expand the last factor
            out = np.einsum("...i,ijk->...jk", out, self.delta)
        return out


@dataclass
class AxiomReport:
    """Per-axiom residuals with pass/fail at a tolerance."""

    residuals: dict[str, float]
    tol: float
    kind: str = "algebra-only"
    tags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> dict[str, bool]:
        return {name: r <= self.tol for name, r in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


@dataclass(frozen=True, eq=False)
class WeakHopfData:
    counit: np.ndarray
    antipode: np.ndarray


def associativity_residual(lam: np.ndarray) -> float:
    left = np.einsum("ijl,lkm->ijkm", lam, lam)
    right = np.einsum("jkl,ilm->ijkm", lam, lam)
    return _maxabs(left - right)


def coassociativity_residual(delta: np.ndarray) -> float:
    left = np.einsum("ijk,jab->iabk", delta, delta)
    right = np.einsum("ijk,kab->ijab", delta, delta)
    return _maxabs(left - right)


def multiplicativity_residual(lam: np.ndarray, delta: np.ndarray) -> float:
    of_product = np.einsum("ijk,kab->ijab", lam, delta)
    product_of = np.einsum("ipq,jrs,pra,qsb->ijab", delta, delta, lam, lam, optimize=True)
    return _maxabs(of_product - product_of)


def unit_residual(lam: np.ndarray, unit: np.ndarray) -> float:
    eye = np.eye(lam.shape[0])
    left = np.einsum("j,jik->ik", unit, lam)
    right = np.einsum("ijk,j->ik", lam, unit)
    return max(_maxabs(left - eye), _maxabs(right - eye))


def counit_residual(delta: np.ndarray, counit: np.ndarray) -> float:
    eye = np.eye(delta.shape[0])
    left = np.einsum("ijk,j->ik", delta, counit)
    right = np.einsum("ijk,k->ij", delta, counit)
    return max(_maxabs(left - eye), _maxabs(right - eye))


def star_residuals(P: PreBialgebra) -> dict[str, float]:
    S = P.star
    n = P.dim
    residuals = {"star_involution": _maxabs(S @ np.conj(S) - np.eye(n))}
    # (e_I e_J)* against e_J* e_I*
    of_product = np.einsum("ijk,lk->ijl", np.conj(P.lam), S)
    reversed_product = np.einsum("pj,qi,pqm->ijm", S, S, P.lam)
    residuals["star_antihomomorphism"] = _maxabs(of_product - reversed_product)
    if P.delta is not None:
        of_star = np.einsum("pi,pab->iab", S, P.delta)
        star_of = np.einsum("iqr,aq,br->iab", np.conj(P.delta), S, S)
        residuals["star_cohomomorphism"] = _maxabs(of_star - star_of)
    return residuals


def check_axioms(P: PreBialgebra, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Measure every axiom the data can be tested against; never raises on failure."""
    residuals = {"associativity": associativity_residual(P.lam)}
    if P.delta is not None:
        residuals["coassociativity"] = coassociativity_residual(P.delta)
        residuals["multiplicativity"] = multiplicativity_residual(P.lam, P.delta)
    if P.unit is not None:
        residuals["unit"] = unit_residual(P.lam, P.unit)
    if P.counit is not None and P.delta is not None:
        residuals["counit"] = counit_residual(P.delta, P.counit)
    if P.star is not None:
        residuals.update(star_residuals(P))

    report = AxiomReport(residuals=residuals, tol=tol)
    passed = report.passed
    if P.delta is not None and all(
        passed[k] for k in ("associativity", "coassociativity", "multiplicativity")
    ):
        report.kind = "pre-bialgebra"
    if passed.get("unit"):
        report.tags.append("unital")
    if passed.get("counit"):
        report.tags.append("counital")
    if P.star is not None and all(v for k, v in passed.items() if k.startswith("star")):
        report.tags.append("star")
    logger.debug(f"axiom residuals: {residuals}")
    return report


def dual(P: PreBialgebra) -> PreBialgebra:
    """Dual pre-bialgebra on the dual basis {e^I}: e^I e^J = sum_K delta[K, I, J] e^K."""
    if P.delta is None:
        raise PreconditionError("the dual needs a comultiplication")
    return PreBialgebra(
        lam=np.transpose(P.delta, (1, 2, 0)),
        delta=np.transpose(P.lam, (2, 0, 1)),
        labels=tuple(_dual_label(label) for label in P.labels),
        unit=P.counit,
        counit=P.unit,
    )


def _dual_label(label: str) -> str:
    if label.startswith("e^"):
        return "e" + label[2:]
    if label.startswith("e"):
        return "e^" + label[1:]
    return f"{label}*"


def _solve_unique(M: np.ndarray, b: np.ndarray, tol: float, what: str) -> np.ndarray | None:
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    residual = _maxabs(M @ x - b)
    if residual > tol * max(1.0, _maxabs(b)):
        logger.debug(f"no {what}: least-squares residual {residual:.3e}")
        return None
    if null_space(M, rcond=tol).shape[1] > 0:
        raise DegenerateAlgebraError(f"{what} is not unique; structure constants are inconsistent")
    return x


def find_unit(P: PreBialgebra, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """Coordinates of the two-sided unit, or None when there is none."""
    n = P.dim
    left = np.transpose(P.lam, (1, 2, 0)).reshape(n * n, n)  # [(i,k), j] = lam[j, i, k]
    right = np.transpose(P.lam, (0, 2, 1)).reshape(n * n, n)  # [(i,k), j] = lam[i, j, k]
    target = np.eye(n).reshape(-1)
    return _solve_unique(np.vstack([left, right]), np.concatenate([target, target]), tol, "unit")


def find_counit(P: PreBialgebra, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    if P.delta is None:
        raise PreconditionError("a counit needs a comultiplication")
    n = P.dim
    left = np.transpose(P.delta, (0, 2, 1)).reshape(n * n, n)  # [(i,k), j] = delta[i, j, k]
    right = P.delta.reshape(n * n, n)  # [(i,j), k] = delta[i, j, k]
    target = np.eye(n).reshape(-1)
    return _solve_unique(np.vstack([left, right]), np.concatenate([target, target]), tol, "counit")


def with_unit(P: PreBialgebra, tol: float = DEFAULT_TOL) -> PreBialgebra:
    """Attach the unit and counit found from the structure constants."""
    counit = find_counit(P, tol) if P.delta is not None else None
    return replace(P, unit=find_unit(P, tol), counit=counit)


def unitize(P: PreBialgebra) -> PreBialgebra:
    """Adjoin a formal unit e^0 at index 0; the result carries no comultiplication."""
    n = P.dim
    lam = np.zeros((n + 1, n + 1, n + 1), dtype=complex)
    lam[1:, 1:, 1:] = P.lam
    lam[0, 0, 0] = 1.0
    for i in range(1, n + 1):
        lam[0, i, i] = 1.0
        lam[i, 0, i] = 1.0
    unit = np.zeros(n + 1, dtype=complex)
    unit[0] = 1.0
    first = "e^0" if any(label.startswith("e^") for label in P.labels) else "1"
    return PreBialgebra(lam=lam, labels=(first, *P.labels), unit=unit, adjoined_unit=True)


def change_basis(P: PreBialgebra, R: np.ndarray) -> PreBialgebra:
    """Structure constants in the basis f_I = sum_J R[I, J] e_J."""
    R = np.asarray(R, dtype=complex)
    if R.shape != (P.dim, P.dim):
        raise ShapeError(f"basis change must be {P.dim}x{P.dim}, got {R.shape}")
    try:
        Rinv = np.linalg.inv(R)
    except np.linalg.LinAlgError as e:
        raise InversionError(f"basis change is singular: {e}") from e
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1e12:
        raise InversionError(f"basis change is numerically singular (condition number {cond:.3e})")
    logger.debug(f"basis change condition number {cond:.3e}")

    lam = np.einsum("ia,jb,abc,ck->ijk", R, R, P.lam, Rinv, optimize=True)
    delta = None
    if P.delta is not None:
        delta = np.einsum("ia,abc,bj,ck->ijk", R, P.delta, Rinv, Rinv, optimize=True)
    unit = Rinv.T @ P.unit if P.unit is not None else None
    counit = R @ P.counit if P.counit is not None else None
    star = Rinv.T @ P.star @ np.conj(R).T if P.star is not None else None
    return PreBialgebra(
        lam=lam,
        delta=delta,
        labels=tuple(f"f{i + 1}" for i in range(P.dim)),
        unit=unit,
        counit=counit,
        star=star,
        adjoined_unit=P.adjoined_unit,
    )


def check_weak_hopf(P: PreBialgebra, W: WeakHopfData, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Residuals of every weak Hopf algebra axiom for (P, counit, antipode)."""
    if P.unit is None or P.delta is None:
        raise PreconditionError("weak Hopf checks need a unit and a comultiplication")
    lam, delta, u = P.lam, P.delta, P.unit
    eps = np.asarray(W.counit, dtype=complex)
    S = np.asarray(W.antipode, dtype=complex)
    residuals = {
        "associativity": associativity_residual(lam),
        "coassociativity": coassociativity_residual(delta),
        "multiplicativity": multiplicativity_residual(lam, delta),
        "unit": unit_residual(lam, u),
        "counit": counit_residual(delta, eps),
    }

    D1 = np.einsum("i,ijk->jk", u, delta)
    triple_unit = np.einsum("jk,jab->abk", D1, delta)
    residuals["unit_weak_comultiplicative"] = max(
        _maxabs(triple_unit - np.einsum("ab,cd,bcm->amd", D1, D1, lam)),
        _maxabs(triple_unit - np.einsum("cd,ab,cbm->amd", D1, D1, lam)),
    )

    eps2 = np.einsum("ipm,m->ip", lam, eps)  # eps(e_i e_p)
    eps3 = np.einsum("xym,mz->xyz", lam, eps2)
    residuals["counit_weak_multiplicative"] = max(
        _maxabs(eps3 - np.einsum("ypq,xp,qz->xyz", delta, eps2, eps2)),
        _maxabs(eps3 - np.einsum("ypq,xq,pz->xyz", delta, eps2, eps2)),
    )

    # x_(1) S(x_(2)) = eps(1_(1) x) 1_(2)
    target_map = np.einsum("ipq,rq,prm->im", delta, S, lam)
    residuals["antipode_target"] = _maxabs(target_map - np.einsum("ab,ai->ib", D1, eps2))
    # S(x_(1)) x_(2) = 1_(1) eps(x 1_(2))
    source_map = np.einsum("ipq,rp,rqm->im", delta, S, lam)
    residuals["antipode_source"] = _maxabs(source_map - np.einsum("ab,ib->ia", D1, eps2))
    # S(x_(1)) x_(2) S(x_(3)) = S(x)
    triple = np.einsum("ijk,jab->iabk", delta, delta)
    sxs = np.einsum("iabk,ra,rbm,tk,mto->io", triple, S, lam, S, lam, optimize=True)
    residuals["antipode_sandwich"] = _maxabs(sxs - S.T)
    residuals["antipode_antimultiplicative"] = _maxabs(
        np.einsum("ijk,mk->ijm", lam, S) - np.einsum("pj,qi,pqm->ijm", S, S, lam)
    )
    residuals["antipode_anticomultiplicative"] = _maxabs(
        np.einsum("pi,pab->iab", S, delta) - np.einsum("iqr,ar,bq->iab", delta, S, S)
    )

    report = AxiomReport(residuals=residuals, tol=tol, kind="weak-hopf-candidate")
    if report.ok:
        report.kind = "weak-hopf"
        report.tags = ["unital", "counital"]
    return report


def check_star(P: PreBialgebra, rep: np.ndarray, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Star axioms plus phi(x*) = phi(x)^dagger for a representation given as matrices rep[I]."""
    if P.star is None:
        raise PreconditionError("algebra carries no star operation")
    rep = np.asarray(rep, dtype=complex)
    residuals = star_residuals(P)
    # phi(e_I*) = sum_J star[J, I] phi(e_J)
    of_star = np.einsum("ji,jab->iab", P.star, rep)
    residuals["star_representation"] = _maxabs(of_star - np.conj(np.transpose(rep, (0, 2, 1))))
    residuals["representation"] = _maxabs(
        np.einsum("iab,jbc->ijac", rep, rep) - np.einsum("ijk,kac->ijac", P.lam, rep)
    )
    report = AxiomReport(residuals=residuals, tol=tol, kind="star-algebra")
    if report.ok:
        report.tags.append("faithful-star-representation")
    return report
