"""Acceptance suite behind `mposym reproduce-paper`.

Each group returns its checks; an exception inside a group is recorded as an
error check and the remaining groups still run.
"""

import json
import logging
import time
from collections.abc import Callable
from dataclasses import replace

import numpy as np

from mposym.algebra.mpo_algebra import MpoFamily, associator, extract_multiplication, solve_family_fusions
from mposym.algebra.prebialgebra import change_basis, check_axioms, check_star, dual, find_unit
from mposym.algebra.rep_theory import (
    decompose_module,
    decompose_regular,
    fusion_multiplicities,
    fusion_table,
    radical_part,
    regular_representation,
    semisimplify,
    simple_quotient,
    tensor_representation,
    wedderburn,
)
from mposym.config import INVARIANCE_TOL, POSITIVITY_TOL, RunConfig
from mposym.core.tensor import MpoTensor
from mposym.errors import MposymError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.channels import semion_channel_check
from mposym.models.group_cocycle import analyze_cocycle, czy_isomorphism, trivial_cocycle, z2_nontrivial
from mposym.models.spin_chains import equivalence_residuals, z2_residuals
from mposym.pipelines import (
    CZY_SEMION_SECTOR,
    Check,
    analysis_data,
    analyze_builtin,
    czy_mpo_residuals,
    czy_positivity,
    czy_reconstruction,
    czy_rfp,
    group_rfp,
    identify,
    residual_check,
    semisimplicity_data,
    verdict_check,
)

logger = logging.getLogger(__name__)

PROPERTY_SEEDS = 5
CZY_REGULAR_DIMS = [3, 2, 2, 2]

# Rep(A*) fusion among the projective covers; S_0 and S_1 follow from their dimensions
CZY_DUAL_FUSION = {
    ("P_0", "P_0"): {"P_0": 1, "S_0": 6},
    ("P_1", "P_1"): {"P_1": 1, "S_0": 2},
    ("P_2", "P_2"): {"P_0": 1, "S_0": 1},
    ("P_0", "P_1"): {"P_0": 1, "S_0": 3},
    ("P_0", "P_2"): {"P_2": 1, "S_0": 4},
    ("P_1", "P_2"): {"P_2": 1, "S_0": 2},
}


def expected_dual_fusion() -> dict[tuple[str, str], dict[str, int]]:
    dims = {label: rep.dim for label, rep in czy.psi_representations().items()}
    table = {}
    for (a, b), counts in CZY_DUAL_FUSION.items():
        table[(a, b)] = table[(b, a)] = counts
    for label, d in dims.items():
        for unit, product in (("S_1", {label: 1}), ("S_0", {"S_0": d})):
            table[(label, unit)] = table[(unit, label)] = product
    table[("S_0", "S_1")] = table[("S_1", "S_0")] = {"S_0": 1}
    return table


def _max(values) -> float:
    return max((float(v) for v in values), default=0.0)


def perturbed_family(eps: float, seed: int) -> MpoFamily:
    """CZY family with A_1 shifted by eps times a seeded random tensor."""
    family = czy.czy_family()
    A1 = family.tensors[1]
    noise = np.random.default_rng(seed).normal(size=A1.data.shape)
    tensors = {0: family.tensors[0], 1: MpoTensor(A1.data + eps * noise, name="A_1~")}
    return MpoFamily(family.group, tensors, family.boundary, name="czy~")


# groups


def anomaly_checks(config: RunConfig, perturb: float) -> list[Check]:
    family = perturbed_family(perturb, config.seed) if perturb else czy.czy_family()
    try:
        fusions = solve_family_fusions(family, czy.czy_fusion_hints(), config.tol, config.seed)
    except MposymError as e:
        detail = f"{type(e).__name__}: {e}"
        return [
            Check("fusion_tensors", "anomaly", False, detail=detail),
            Check("associator_cocycle", "anomaly", False, detail="no fusion tensors"),
        ]
    checks = [residual_check("fusion_tensors", _max(s.residual for s in fusions.values()), "anomaly", config.tol)]
    try:
        table = associator(family, fusions, config.tol)
    except MposymError as e:
        return [*checks, Check("associator_cocycle", "anomaly", False, detail=f"{type(e).__name__}: {e}")]
    omega = table.normalized
    checks += [
        residual_check("associator_cocycle", _max(table.residuals.values()), "anomaly", config.tol),
        residual_check("associator_omega_111", abs(omega[(1, 1, 1)] + 1), "anomaly", config.tol),
        residual_check(
            "associator_omega_other",
            _max(abs(w - 1) for key, w in omega.items() if key != (1, 1, 1)),
            "anomaly",
            config.tol,
        ),
        verdict_check("associator_class_nontrivial", table.cohomology_class == "nontrivial", "anomaly"),
    ]
    return checks


def structure_checks(config: RunConfig, perturb: float) -> list[Check]:
    family = czy.czy_family()
    fusions = solve_family_fusions(family, czy.czy_fusion_hints(), config.tol, config.seed)
    reference = czy.czy_lambda()
    by_fusion = extract_multiplication(family, fusions, method="fusion", tol=config.tol, cap=config.cap)
    by_ops = extract_multiplication(family, method="operators", tol=config.tol, cap=config.cap)
    A = czy.czy_algebra()
    unit = find_unit(A, config.tol)
    star = check_star(A, czy.czy_operators(), config.tol)
    axioms = check_axioms(A, config.tol)
    checks = [
        residual_check("lambda_fusion_formula", np.abs(by_fusion - reference).max(), "structure", config.tol),
        residual_check("lambda_operator_products", np.abs(by_ops - reference).max(), "structure", config.tol),
        residual_check("lambda_methods_agree", np.abs(by_fusion - by_ops).max(), "structure", config.tol),
        verdict_check(
            "unit_is_e3",
            unit is not None and np.allclose(unit, np.eye(8)[2], atol=config.tol),
            "structure",
        ),
    ]
    checks += [residual_check(f"star_{k}", v, "structure", config.tol) for k, v in star.residuals.items()]
    checks += [residual_check(f"axiom_{k}", v, "structure", config.tol) for k, v in axioms.residuals.items()]
    checks += [
        residual_check(f"mpo_{k}_{n}", v, "structure", config.tol)
        for n in range(2, 7)
        for k, v in czy_mpo_residuals(n, config.cap).items()
    ]
    return checks


def _trace_form_nullity(algebra, tol: float) -> int:
    L = regular_representation(algebra, tol).matrices
    form = np.einsum("iab,jba->ij", L, L)
    return algebra.dim - int(np.linalg.matrix_rank(form, tol=tol * max(1.0, np.abs(form).max())))


def semisimplicity_checks(config: RunConfig, perturb: float) -> list[Check]:
    data = semisimplicity_data(config.tol, config.seed)
    oracle = _trace_form_nullity(czy.czy_dual_plus(), config.tol)
    return [
        verdict_check("radical_zero", data["radical_dim"] == 0, "semisimplicity"),
        verdict_check("blocks_2_2", data["block_sizes"] == [2, 2], "semisimplicity", detail=str(data["block_sizes"])),
        residual_check("matrix_unit_basis", data["matrix_unit_residual"], "semisimplicity", config.tol),
        verdict_check("phi_1_is_irrep", data["phi_1_matches_irrep"], "semisimplicity"),
        verdict_check("dual_has_no_unit", not data["dual_unit_found"], "semisimplicity"),
        verdict_check(
            "dual_radical_dim_3",
            data["dual_radical_dim"] == 3 == oracle,
            "semisimplicity",
            detail=f"radical {data['dual_radical_dim']}, trace-form oracle {oracle}",
        ),
    ]


def module_checks(config: RunConfig, perturb: float) -> list[Check]:
    tol, seed = config.tol, config.seed
    psis = czy.psi_representations()
    catalog = list(psis.values())
    regular = decompose_regular(czy.czy_dual_plus(), catalog, tol, seed)
    heads = {label: identify(simple_quotient(psis[label], tol), catalog, tol, seed) for label in ("P_0", "P_1")}
    rad_p1 = radical_part(psis["P_1"], tol)
    rad_label = identify(rad_p1, catalog, tol, seed) if rad_p1 is not None else None
    return [
        verdict_check(
            "regular_dims",
            sorted(regular.dims, reverse=True) == CZY_REGULAR_DIMS,
            "modules",
            detail=str(regular.dims),
        ),
        verdict_check(
            "regular_multiplicities",
            regular.multiplicities() == {"P_0": 1, "P_1": 1, "P_2": 2},
            "modules",
            detail=str(regular.multiplicities()),
        ),
        residual_check("regular_blocks", regular.residual, "modules", config.tol),
        verdict_check("rad_P1_is_S0", rad_label == "S_0", "modules", detail=str(rad_label)),
        verdict_check("head_P0_is_S0", heads["P_0"] == "S_0", "modules", detail=str(heads["P_0"])),
        verdict_check("head_P1_is_S1", heads["P_1"] == "S_1", "modules", detail=str(heads["P_1"])),
    ]


def fusion_checks(config: RunConfig, perturb: float) -> list[Check]:
    tol, seed = config.tol, config.seed
    A = czy.czy_algebra()
    wd = wedderburn(A, tol, seed)
    ring = fusion_multiplicities(wd.irreps, wd.central_idempotents, A)
    catalog = list(czy.psi_representations().values())
    table = fusion_table(catalog, dual(A), tol=tol, seed=seed)
    expected = expected_dual_fusion()
    wrong = sorted(f"{a}x{b}" for (a, b), counts in expected.items() if table.get((a, b)) != counts)
    sector = semisimplify(table, CZY_SEMION_SECTOR)
    z2 = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
    return [
        verdict_check("rep_A_all_ones", bool((ring.N == 1).all()), "fusion"),
        verdict_check("dual_fusion_rules", not wrong, "fusion", detail=", ".join(wrong)),
        verdict_check("semion_sector_z2", bool(np.array_equal(sector.N, z2)), "fusion"),
    ]


def reconstruction_checks(config: RunConfig, perturb: float) -> list[Check]:
    result = czy_reconstruction(config.tol, config.seed)
    return [
        residual_check("rebuilt_A0", result.residuals[0], "reconstruction", config.tol),
        residual_check("rebuilt_A1", result.residuals[1], "reconstruction", config.tol),
        verdict_check("rebuilt_class_semion", result.table.cohomology_class == "nontrivial", "reconstruction"),
    ]


def rfp_checks(config: RunConfig, perturb: float) -> list[Check]:
    outcome = czy_rfp((2, 3, 4), tol=config.tol, seed=config.seed, cap=config.cap)
    M = outcome.construction.tensor
    checks = [
        verdict_check("rfp_shape", (M.d_out, M.bond) == (4, 3), "rfp", detail=f"physical {M.d_out}, bond {M.bond}"),
        residual_check("rfp_weights", _max(abs(w - 0.25) for w in outcome.construction.weights), "rfp", config.tol),
        verdict_check("rfp_blocks_identified", not outcome.report.unidentified, "rfp"),
    ]
    checks += [residual_check(f"rfp_{k}", v, "rfp", config.tol) for k, v in outcome.report.residuals.items()]
    checks += [residual_check(f"spectrum_{2 * n}", r, "rfp", config.tol) for n, r in outcome.spectrum_residuals.items()]
    checks += [residual_check(f"rfp_trace_{n}", r, "rfp", config.tol) for n, r in outcome.traces.items()]
    checks += [residual_check(f"interchange_{n}", r, "rfp", config.tol) for n, r in outcome.interchange.items()]
    return checks


def positivity_checks(config: RunConfig, perturb: float) -> list[Check]:
    witness, result = czy_positivity(config.tol)
    return [
        residual_check("witness_yy_star", witness, "positivity", config.tol),
        verdict_check("character_positive", result.witness is not None, "positivity", result.min_eigenvalue),
        residual_check("factorization", result.residual, "positivity", np.sqrt(config.tol)),
    ]


def spin_chain_checks(config: RunConfig, perturb: float) -> list[Check]:
    checks = []
    for n in (4, 8):
        checks += [
            residual_check(f"{name}_{n}", r, "spin_chains", config.tol) for name, r in equivalence_residuals(n).items()
        ]
    for n in (4, 6, 8):
        residuals = z2_residuals(n, config.tol)
        commutator = residuals.pop("charge_commutator")
        checks += [residual_check(f"{name}_{n}", r, "spin_chains", config.tol) for name, r in residuals.items()]
        checks.append(verdict_check(f"charges_do_not_commute_{n}", commutator > config.tol, "spin_chains", commutator))
    return checks


def channel_checks(config: RunConfig, perturb: float) -> list[Check]:
    report = semion_channel_check(4, config.tol)
    return [residual_check(name, r, "channel", config.tol) for name, r in report.residuals.items()]


def group_checks(config: RunConfig, perturb: float) -> list[Check]:
    tol, cap = config.tol, config.cap
    report = analyze_cocycle(z2_nontrivial(), 4, tol, cap)
    trivial = analyze_cocycle(trivial_cocycle(FiniteGroup.cyclic(2)), 4, tol, cap)
    iso = czy_isomorphism((2, 3, 4), tol, cap)
    checks = [residual_check(f"z2_{k}", v, "groups", tol) for k, v in report.residuals.items()]
    checks += [
        verdict_check("z2_class_nontrivial", report.associator_class[0] == "nontrivial", "groups"),
        verdict_check("z2_injectivity", report.injective == {0: False, 1: True}, "groups", detail=str(report.injective)),
        verdict_check("z2_no_counit", not report.counit_found, "groups"),
        verdict_check("trivial_class", trivial.associator_class[0] == "trivial", "groups"),
    ]
    checks += [residual_check(f"czy_isomorphism_{k}", v, "groups", tol) for k, v in iso.residuals.items()]
    fixed = group_rfp(z2_nontrivial(), (2, 3), tol, config.seed, cap)
    checks += [
        verdict_check(f"z2_rfp_positive_{n}", v >= -POSITIVITY_TOL, "groups", v) for n, v in fixed.min_eigenvalues.items()
    ]
    checks += [residual_check(f"z2_rfp_{k}", v, "groups", tol) for k, v in fixed.report.residuals.items()]
    checks.append(verdict_check("z2_rfp_blocks_identified", not fixed.report.unidentified, "groups"))
    return checks


def property_checks(config: RunConfig, perturb: float) -> list[Check]:
    tol = config.tol
    family = czy.czy_family()
    fusions = solve_family_fusions(family, czy.czy_fusion_hints(), tol, config.seed)
    A = czy.czy_algebra()
    psis = czy.psi_representations()
    catalog = list(psis.values())
    labels = list(psis)
    checks = []
    for k in range(PROPERTY_SEEDS):
        seed = config.seed + k
        rng = np.random.default_rng(seed)

        phases = np.exp(2j * np.pi * rng.random(len(fusions)))
        rescaled = {
            key: replace(sol, Y=c * sol.Y, Y_rinv=sol.Y_rinv / c)
            for c, (key, sol) in zip(phases, fusions.items(), strict=True)
        }
        table = associator(family, rescaled, tol)
        checks.append(verdict_check(f"gauge_class_invariant_{seed}", table.cohomology_class == "nontrivial", "properties"))

        R = rng.normal(size=(8, 8)) + 8 * np.eye(8)
        moved = check_axioms(change_basis(A, R), INVARIANCE_TOL)
        checks.append(
            verdict_check(f"axioms_after_basis_change_{seed}", moved.kind == "pre-bialgebra", "properties", _max(moved.residuals.values()))
        )

        a, b = rng.choice(labels, size=2)
        product = tensor_representation(psis[a], psis[b], dual(A))
        decomposition = decompose_module(product, catalog, tol, seed)
        regular = decompose_regular(czy.czy_dual_plus(), catalog, tol, seed)
        checks.append(
            verdict_check(
                f"dimension_count_{seed}",
                decomposition.total_dim() == product.dim and regular.total_dim() == 9,
                "properties",
                detail=f"{a}x{b}",
            )
        )
        again = decompose_module(product, catalog, tol, seed)
        checks.append(
            verdict_check(
                f"deterministic_{seed}",
                again.multiplicities() == decomposition.multiplicities()
                and np.array_equal(again.intertwiner, decomposition.intertwiner),
                "properties",
            )
        )
    first = json.dumps(analysis_data(analyze_builtin("czy", tol, config.seed, config.cap)), sort_keys=True)
    other = json.dumps(analysis_data(analyze_builtin("czy", tol, config.seed + 7, config.cap)), sort_keys=True)
    checks.append(verdict_check("report_invariant_under_seed", first == other, "properties"))
    return checks


GROUPS: dict[str, Callable[[RunConfig, float], list[Check]]] = {
    "anomaly": anomaly_checks,
    "structure": structure_checks,
    "semisimplicity": semisimplicity_checks,
    "modules": module_checks,
    "fusion": fusion_checks,
    "reconstruction": reconstruction_checks,
    "rfp": rfp_checks,
    "positivity": positivity_checks,
    "spin_chains": spin_chain_checks,
    "channel": channel_checks,
    "groups": group_checks,
    "properties": property_checks,
}


def run_suite(config: RunConfig, only: str | None = None, perturb: float = 0.0) -> tuple[list[Check], dict]:
    """Run every group (or just ``only``) and collect the checks."""
    checks: list[Check] = []
    summary = {}
    for name, group in GROUPS.items():
        if only and name != only:
            continue
        start = time.perf_counter()
        try:
            found = group(config, perturb)
        except MposymError as e:
            logger.error(f"group {name} stopped: {type(e).__name__}: {e}")
            found = [Check(f"{name}_completed", name, False, detail=f"{type(e).__name__}: {e}", error=True)]
        elapsed = time.perf_counter() - start
        failed = [c.name for c in found if not c.passed]
        logger.info(f"{name}: {len(found) - len(failed)}/{len(found)} passed in {elapsed:.2f}s")
        summary[name] = {"passed": len(found) - len(failed), "failed": failed}
        checks += found
    return checks, {"groups": summary, "perturb": perturb}
