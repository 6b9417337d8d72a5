"""Multi-stage analyses shared by the command line and the acceptance suite."""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np

from mposym.algebra.mpo_algebra import (
    AssociatorTable,
    FusionSolution,
    MpoFamily,
    associator,
    family_prebialgebra,
    solve_family_fusions,
)
from mposym.algebra.prebialgebra import AxiomReport, PreBialgebra, check_axioms, dual, find_unit, unitize, with_unit
from mposym.algebra.rep_theory import (
    FusionRing,
    ModuleDecomposition,
    Representation,
    build_catalog,
    decompose_module,
    decompose_regular,
    direct_sum,
    fusion_multiplicities,
    fusion_table,
    module_isomorphic,
    radical,
    radical_part,
    semisimplify,
    simple_quotient,
    wedderburn,
)
from mposym.config import DEFAULT_CAP, DEFAULT_SEED, DEFAULT_TOL
from mposym.core.tensor import MpoTensor, boundary_unit, mpdo_contract, mpo_close
from mposym.errors import MposymError, NotSemisimpleError, ParameterError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.channels import czy_state
from mposym.models.group_cocycle import (
    GroupPreBialgebras,
    ThreeCocycle,
    group_cocycle_mpo,
    group_fusions,
    group_prebialgebra,
    onsite_family,
    operator_representation,
    trivial_cocycle,
    z2_nontrivial,
)
from mposym.models.pauli import I2, X
from mposym.models.spin_chains import czy_unitary
from mposym.rfp.canonical import CanonicalForm, RfpReport, verify_rfp, vertical_canonical_form
from mposym.rfp.construction import (
    PositivityResult,
    RfpConstruction,
    UnitaryFit,
    WhaRfpData,
    build_mpo_tensor,
    build_rfp_tensor,
    check_positivity,
    compare_mpdos,
    fit_local_unitary,
    wha_rfp_tensor,
)
from mposym.schemas import CheckResult

logger = logging.getLogger(__name__)

BUILTIN_FAMILIES = ("czy", "z2-onsite")
BUILTIN_COCYCLES = ("z2-cocycle-trivial", "z2-cocycle-nontrivial")
CZY_SEMION_SECTOR = ["P_0", "P_2"]


@dataclass
class Check:
    name: str
    citation: str
    passed: bool
    residual: float | None = None
    detail: str = ""
    error: bool = False

    @property
    def status(self) -> str:
        if self.error:
            return "error"
        return "pass" if self.passed else "fail"

    def as_dict(self) -> CheckResult:
        out: CheckResult = {
            "name": self.name,
            "status": self.status,
            "residual": None if self.residual is None else float(self.residual),
            "citation": self.citation,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def residual_check(name: str, residual: float, citation: str, tol: float, detail: str = "") -> Check:
    return Check(name, citation, bool(residual <= tol), float(residual), detail)


def verdict_check(name: str, ok: bool, citation: str, residual: float | None = None, detail: str = "") -> Check:
    return Check(name, citation, bool(ok), residual, detail)


@contextmanager
def stage(name: str):
    """Log the failing stage before an error propagates."""
    try:
        yield
    except MposymError as e:
        logger.error(f"stage '{name}' failed: {type(e).__name__}: {e}")
        raise


# builtin inputs


def builtin_family(name: str) -> tuple[MpoFamily, dict[tuple[int, int], np.ndarray], np.ndarray | None]:
    """Family, fusion hints and star matrix of a compiled-in example."""
    if name == "czy":
        return czy.czy_family(), czy.czy_fusion_hints(), czy.czy_star()
    if name == "z2-onsite":
        return onsite_family(FiniteGroup.cyclic(2), [I2, X], name="z2-onsite"), {}, None
    raise ParameterError(f"unknown builtin family {name!r}; choose one of {', '.join(BUILTIN_FAMILIES)}")


def builtin_cocycle(name: str) -> ThreeCocycle:
    if name == "z2-cocycle-trivial":
        return trivial_cocycle(FiniteGroup.cyclic(2))
    if name == "z2-cocycle-nontrivial":
        return z2_nontrivial()
    raise ParameterError(f"unknown builtin cocycle {name!r}; choose one of {', '.join(BUILTIN_COCYCLES)}")


# representation tables


@dataclass
class ModuleRow:
    label: str
    dim: int
    head: str | None
    radical: dict[str, int]
    simple: bool = False
    projective: bool = False

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "simple": self.simple,
            "projective": self.projective,
            "head": self.head,
            "radical": self.radical,
        }


@dataclass
class RepresentationTables:
    radical_dim: int
    block_sizes: list[int] | None
    ring: FusionRing | None
    dual_unit_found: bool
    dual_radical_dim: int
    regular: ModuleDecomposition
    rows: list[ModuleRow]
    dual_fusion: dict[tuple[str, str], dict[str, int]]
    sector: FusionRing | None = None


def identify(rep: Representation, catalog: list[Representation], tol: float, seed: int) -> str | None:
    for ref in catalog:
        if ref.dim == rep.dim and module_isomorphic(rep, ref, tol, seed) is not None:
            return ref.name
    return None


def _dual_with_unit(P: PreBialgebra, tol: float) -> tuple[PreBialgebra, PreBialgebra, bool]:
    D = dual(P)
    unit = find_unit(D, tol)
    if unit is None:
        return D, unitize(D), False
    D = replace(D, unit=unit)
    return D, D, True


def auto_catalog(Dp: PreBialgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> list[Representation]:
    """Simple modules, then the projective covers not already among them."""
    simples, projectives = build_catalog(Dp, tol, seed)
    catalog = list(simples)
    for p in projectives:
        if identify(p, catalog, tol, seed) is None:
            catalog.append(p)
    return catalog


def module_rows(
    catalog: list[Representation], regular: ModuleDecomposition, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> list[ModuleRow]:
    """Head, radical and simplicity of every catalog module; projective means it occurs in the regular module."""
    occurring = regular.multiplicities()
    rows = []
    for rep in catalog:
        head = identify(simple_quotient(rep, tol), catalog, tol, seed)
        part = radical_part(rep, tol)
        rad_labels = decompose_module(part, catalog, tol, seed).multiplicities() if part is not None else {}
        rows.append(
            ModuleRow(rep.name, rep.dim, head, rad_labels, simple=part is None, projective=rep.name in occurring)
        )
    return rows


def decomposition_table(
    algebra: PreBialgebra,
    catalog: list[Representation] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> tuple[ModuleDecomposition, list[ModuleRow]]:
    """Regular decomposition of a unital algebra and the rows of its module catalog."""
    if catalog is None:
        catalog = auto_catalog(algebra, tol, seed)
    regular = decompose_regular(algebra, catalog, tol, seed)
    return regular, module_rows(catalog, regular, tol, seed)


def representation_tables(
    P: PreBialgebra,
    catalog: list[Representation] | None = None,
    keep: list[str] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> RepresentationTables:
    """Semisimplicity, Rep(A) fusion, and the module structure and fusion of the dual."""
    rad = radical(P, tol)
    block_sizes, ring = None, None
    if len(rad) == 0:
        wd = wedderburn(P, tol, seed)
        block_sizes = wd.block_sizes
        ring = fusion_multiplicities(wd.irreps, wd.central_idempotents, P)
    else:
        logger.info(f"algebra is not semisimple (radical dimension {len(rad)}); skipping Rep(A) fusion")

    D, Dp, dual_unit_found = _dual_with_unit(P, tol)
    dual_rad = radical(Dp, tol)
    if catalog is None:
        catalog = auto_catalog(Dp, tol, seed)
    regular = decompose_regular(Dp, catalog, tol, seed)

    rows = [row for row in module_rows(catalog, regular, tol, seed) if row.label.startswith("P_")]

    dual_fusion = fusion_table(catalog, D, tol=tol, seed=seed)
    sector = semisimplify(dual_fusion, keep) if keep else None
    return RepresentationTables(
        radical_dim=len(rad),
        block_sizes=block_sizes,
        ring=ring,
        dual_unit_found=dual_unit_found,
        dual_radical_dim=len(dual_rad),
        regular=regular,
        rows=rows,
        dual_fusion=dual_fusion,
        sector=sector,
    )


# family analysis


@dataclass
class FamilyAnalysis:
    name: str
    fusions: dict[tuple[int, int], FusionSolution]
    table: AssociatorTable
    algebra: PreBialgebra
    axioms: AxiomReport
    tables: RepresentationTables | None = None


def analyze_family(
    family: MpoFamily,
    hints: dict[tuple[int, int], np.ndarray] | None = None,
    star: np.ndarray | None = None,
    catalog: list[Representation] | None = None,
    keep: list[str] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    cap: int = DEFAULT_CAP,
    representations: bool = True,
) -> FamilyAnalysis:
    """Fusion tensors, associator, structure constants and representation tables of an MPO family."""
    with stage("fusion"):
        fusions = solve_family_fusions(family, hints, tol, seed)
    with stage("associator"):
        table = associator(family, fusions, tol)
    with stage("extraction"):
        P = family_prebialgebra(family, fusions, method="both", tol=tol, cap=cap)
        P = with_unit(replace(P, star=star), tol)
        axioms = check_axioms(P, tol)
    analysis = FamilyAnalysis(family.name, fusions, table, P, axioms)
    if representations:
        with stage("representations"):
            analysis.tables = representation_tables(P, catalog, keep, tol, seed)
    return analysis


def analyze_builtin(
    name: str, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED, cap: int = DEFAULT_CAP
) -> FamilyAnalysis:
    if name in BUILTIN_COCYCLES:
        return analyze_group(builtin_cocycle(name), tol, seed)
    family, hints, star = builtin_family(name)
    if name == "czy":
        catalog = list(czy.psi_representations().values())
        return analyze_family(family, hints, star, catalog, CZY_SEMION_SECTOR, tol, seed, cap)
    return analyze_family(family, hints, star, tol=tol, seed=seed, cap=cap)


def analyze_group(omega: ThreeCocycle, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> FamilyAnalysis:
    """Same stages for a group-cocycle family, with analytic fusion tensors and structure constants."""
    with stage("fusion"):
        mpo = group_cocycle_mpo(omega, tol)
        fusions = group_fusions(mpo, tol)
    with stage("associator"):
        table = associator(mpo.family, fusions, tol)
    with stage("extraction"):
        P = group_prebialgebra(omega).growing
        axioms = check_axioms(P, tol)
    analysis = FamilyAnalysis(mpo.family.name, fusions, table, P, axioms)
    with stage("representations"):
        analysis.tables = representation_tables(P, tol=tol, seed=seed)
    return analysis


def _entries(T: np.ndarray) -> list[list]:
    return [[*map(int, idx), float(T[tuple(idx)].real), float(T[tuple(idx)].imag)] for idx in np.argwhere(np.abs(T) > 1e-12)]


def analysis_data(analysis: FamilyAnalysis) -> dict:
    """Gauge-independent summary of an analysis, safe to diff between runs."""
    P = analysis.algebra
    out = {
        "family": analysis.name,
        "associator": {f"{a},{b},{c}": [w.real, w.imag] for (a, b, c), w in sorted(analysis.table.normalized.items())},
        "cohomology_class": analysis.table.cohomology_class,
        "class_index": analysis.table.class_index,
        "basis": list(P.labels),
        "lambda": _entries(P.lam),
        "coLambda": _entries(P.delta) if P.delta is not None else [],
        "unit": None if P.unit is None else [[z.real, z.imag] for z in P.unit],
        "counit_found": P.counit is not None,
        "axioms": {"kind": analysis.axioms.kind, "tags": analysis.axioms.tags},
    }
    t = analysis.tables
    if t is not None:
        out["representations"] = {
            "radical_dim": t.radical_dim,
            "block_sizes": t.block_sizes,
            "rep_A_fusion": None if t.ring is None else t.ring.N.tolist(),
            "dual_unit_found": t.dual_unit_found,
            "dual_radical_dim": t.dual_radical_dim,
            "regular_dims": sorted(t.regular.dims, reverse=True),
            "regular_multiplicities": t.regular.multiplicities(),
            "modules": [r.as_dict() for r in t.rows],
            "dual_fusion": {f"{a}x{b}": counts for (a, b), counts in sorted(t.dual_fusion.items())},
        }
        if t.sector is not None:
            out["representations"]["sector"] = {"labels": list(t.sector.labels), "N": t.sector.N.tolist()}
    return out


# CZY-specific pipelines


@dataclass
class ReconstructionResult:
    tensors: dict[int, MpoTensor]
    residuals: dict[int, float]
    table: AssociatorTable


def czy_reconstruction(tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> ReconstructionResult:
    """MPO tensors rebuilt from (phi_1, psi_P0) and (phi_1, psi_P2), compared with A_0, A_1."""
    phi = czy.phi_representations()["phi_1"]
    psis = czy.psi_representations()
    reference = czy.czy_tensors()
    tensors = {0: build_mpo_tensor(phi, psis["P_0"]), 1: build_mpo_tensor(phi, psis["P_2"])}
    residuals = {a: float(np.abs(tensors[a].data - reference[a].data).max()) for a in (0, 1)}
    family = MpoFamily(FiniteGroup.cyclic(2), tensors, czy.BOUNDARY, name="rebuilt")
    table = associator(family, solve_family_fusions(family, czy.czy_fusion_hints(), tol, seed), tol)
    return ReconstructionResult(tensors, residuals, table)


@dataclass
class RfpOutcome:
    construction: RfpConstruction
    canonical: CanonicalForm
    report: RfpReport
    spectrum_residuals: dict[int, float] = field(default_factory=dict)
    hermiticity: dict[int, float] = field(default_factory=dict)
    # |Tr rho - 1| of the unnormalized MPDO
    traces: dict[int, float] = field(default_factory=dict)
    interchange: dict[int, float] = field(default_factory=dict)
    fit: UnitaryFit | None = None


def czy_rfp_psi(label: str = "S_1") -> Representation:
    """psi_label (+) psi_S2 over the unitized dual."""
    psis = czy.psi_representations()
    return direct_sum([psis[label], psis["P_2"]], name=f"{label}+S_2")


def spectrum_residual(rho: np.ndarray, target: np.ndarray, normalized: bool = True) -> float:
    """Distance of the spectra, trace-normalized unless ``normalized`` is False."""
    a = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    b = np.linalg.eigvalsh((target + target.conj().T) / 2)
    if normalized:
        a, b = a / np.trace(rho).real, b / np.trace(target).real
    return float(np.abs(np.sort(a) - np.sort(b)).max())


def czy_rfp(
    sizes: tuple[int, ...] = (2, 3, 4),
    fit: bool = False,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    cap: int = DEFAULT_CAP,
) -> RfpOutcome:
    """The fixed-point MPDO of the CZY pre-bialgebra, its canonical form and its spectra."""
    A = czy.czy_algebra()
    phis = czy.phi_representations()
    irreps = [phis["phi_1"], phis["phi_2"]]
    with stage("rfp construction"):
        construction = build_rfp_tensor(A, czy_rfp_psi("S_1"), irreps, tol, seed)
    with stage("canonical form"):
        canonical = vertical_canonical_form(construction.tensor, tol, seed)
        report = verify_rfp(canonical, tol, seed)
    outcome = RfpOutcome(construction, canonical, report)
    for n in sizes:
        rho = mpdo_contract(construction.tensor, n, cap).matrix
        outcome.hermiticity[n] = float(np.abs(rho - rho.conj().T).max())
        outcome.spectrum_residuals[n] = spectrum_residual(rho, czy_state(2 * n))
        outcome.traces[n] = abs(complex(np.trace(rho)) - 1.0)
    with stage("interchangeability"):
        alternative = build_rfp_tensor(A, czy_rfp_psi("P_0"), irreps, tol, seed)
        outcome.interchange = compare_mpdos(construction.tensor, alternative.tensor, max(sizes), cap)
    if fit:
        rho = mpdo_contract(construction.tensor, 2, cap).matrix
        outcome.fit = fit_local_unitary(rho / np.trace(rho), czy_state(4), d=4, n_sites=2, seed=seed)
    return outcome


def czy_positivity(tol: float = DEFAULT_TOL) -> tuple[float, PositivityResult]:
    """Residual of the stored witness y y* = x, and the factorization found through O^(2)."""
    A = czy.czy_algebra()
    y = czy.POSITIVITY_WITNESS
    witness_residual = float(np.abs(A.multiply(y, A.apply_star(y)) - czy.POSITIVE_ELEMENT).max())
    result = check_positivity(A, czy_rfp_psi("S_1"), czy.czy_operators(), tol)
    return witness_residual, result


def semisimplicity_data(tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> dict:
    """Radicals of A and of the unitized dual, Wedderburn blocks, the matrix-unit basis and the phi_1 similarity."""
    A = czy.czy_algebra()
    wd = wedderburn(A, tol, seed)
    phi1 = czy.phi_representations()["phi_1"]
    matched = any(rep.dim == phi1.dim and module_isomorphic(phi1, rep, tol, seed) is not None for rep in wd.irreps)
    D = dual(A)
    try:
        dual_rad = len(radical(unitize(D), tol))
    except NotSemisimpleError:
        dual_rad = -1
    units = czy.czy_matrix_units()
    return {
        "radical_dim": len(radical(A, tol)),
        "block_sizes": wd.block_sizes,
        "matrix_unit_residual": float(np.abs(units.lam - czy.matrix_unit_constants()).max()),
        "phi_1_matches_irrep": matched,
        "dual_unit_found": find_unit(D, tol) is not None,
        "dual_radical_dim": dual_rad,
    }


def czy_mpo_residuals(n_sites: int, cap: int = DEFAULT_CAP) -> dict[str, float]:
    """A_0 closed with e_0^{22} is the identity; A_1 closed with the trace is U_CZY."""
    tensors = czy.czy_tensors()
    identity = mpo_close(tensors[0], boundary_unit(tensors[0].bond, 1, 1), n_sites, cap).matrix
    closed = mpo_close(tensors[1], np.eye(tensors[1].bond), n_sites, cap).matrix
    return {
        "squared_symmetry_identity": float(np.abs(identity - np.eye(2**n_sites)).max()),
        "czy_closure": float(np.abs(closed - czy_unitary(n_sites)).max()),
    }


# finite-group pipelines


@dataclass
class GroupFixedPoint:
    tensor: MpoTensor
    data: WhaRfpData
    canonical: CanonicalForm
    report: RfpReport
    min_eigenvalues: dict[int, float] = field(default_factory=dict)


def dual_regular_representation(algebras: GroupPreBialgebras) -> Representation:
    """Left regular module of the dual of (A, Delta^), unital through the counit."""
    D = dual(algebras.boundary)
    return Representation(D, D.left_regular(), name="dual_regular", faithful=True)


def group_rfp(
    omega: ThreeCocycle,
    sizes: tuple[int, ...] = (2, 3),
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    cap: int = DEFAULT_CAP,
) -> GroupFixedPoint:
    """Fixed-point MPDO of the weak Hopf algebra (A, Delta^) of a normalized cocycle."""
    algebras = group_prebialgebra(omega)
    phi = operator_representation(algebras)
    psi = dual_regular_representation(algebras)
    with stage("weak Hopf fixed point"):
        tensor, data = wha_rfp_tensor(algebras.boundary, algebras.hopf, phi, psi, tol=tol, seed=seed)
    with stage("canonical form"):
        canonical = vertical_canonical_form(tensor, tol, seed)
        report = verify_rfp(canonical, tol, seed)
    out = GroupFixedPoint(tensor, data, canonical, report)
    for n in sizes:
        rho = mpdo_contract(tensor, n, cap).matrix
        out.min_eigenvalues[n] = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    logger.info(f"group fixed point for {omega.name}: smallest eigenvalues {out.min_eigenvalues}")
    return out
