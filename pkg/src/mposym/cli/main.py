import argparse
import json
import logging
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from mposym.algebra.mpo_algebra import associator, solve_family_fusions
from mposym.algebra.prebialgebra import PreBialgebra, dual, unitize
from mposym.algebra.rep_theory import Representation
from mposym.cli.suite import GROUPS, run_suite
from mposym.config import POSITIVITY_TOL, RunConfig
from mposym.core import io
from mposym.core.tensor import mpdo_contract
from mposym.errors import INPUT_ERRORS, NUMERICAL_ERRORS, InputError, MposymError, ParameterError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.channels import semion_channel_check
from mposym.models.group_cocycle import (
    ThreeCocycle,
    analyze_cocycle,
    cyclic_cocycle,
    group_cocycle_mpo,
    group_prebialgebra,
    trivial_cocycle,
)
from mposym.models.spin_chains import equivalence_residuals, z2_residuals
from mposym.pipelines import (
    BUILTIN_COCYCLES,
    BUILTIN_FAMILIES,
    CZY_SEMION_SECTOR,
    Check,
    analysis_data,
    analyze_builtin,
    analyze_family,
    builtin_family,
    czy_mpo_residuals,
    czy_rfp,
    decomposition_table,
    group_rfp,
    representation_tables,
    residual_check,
    stage,
    verdict_check,
)
from mposym.rfp.canonical import verify_rfp, vertical_canonical_form
from mposym.rfp.construction import build_rfp_tensor
from mposym.schemas import Report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4
MODEL_CHECKS = ("all", "equivalences", "charges", "channel", "mpo")


def setup_logging(debug: bool = False) -> None:
    """Configure logging based on debug flag"""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


# reporting


def build_report(command: str, config: RunConfig, checks: list[Check], artifacts: list[str], data: dict) -> Report:
    return {
        "command": command,
        "config": config.echo(),
        "checks": [c.as_dict() for c in checks],
        "artifacts": artifacts,
        "data": data,
    }


def render_text(report: Report) -> str:
    lines = [f"mposym {report['command']}"]
    for check in report["checks"]:
        residual = "" if check["residual"] is None else f" residual={check['residual']:.3e}"
        detail = f" ({check['detail']})" if check.get("detail") else ""
        lines.append(f"  {check['status'].upper():5} {check['name']}{residual} [{check['citation']}]{detail}")
    for path in report["artifacts"]:
        lines.append(f"  wrote {path}")
    return "\n".join(lines)


def emit_report(report: Report, config: RunConfig) -> None:
    if config.out is not None:
        io.write_json(report, config.out)
        return
    if config.as_json:
        print(json.dumps(report, indent=2))
    else:
        print(render_text(report))


def exit_code(checks: list[Check]) -> int:
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED_CHECK


# input helpers


def _payload(path: str) -> dict:
    """JSON file contents, unwrapping the data of a saved report."""
    data = io.load_json(Path(path))
    if isinstance(data, dict) and "command" in data and "data" in data:
        return data["data"]
    return data


def _load_family(args: argparse.Namespace):
    """(family, hints, star) from --builtin or --family/--hint."""
    if args.family:
        family = io.family_from_json(io.load_json(Path(args.family)))
        hints = io.fusion_hints_from_json(_payload(args.hint)) if args.hint else None
        return family, hints, None
    family, hints, star = builtin_family(args.builtin)
    if args.hint:
        hints = io.fusion_hints_from_json(_payload(args.hint))
    return family, hints, star


def _load_prebialgebra(path: str):
    return io.prebialgebra_from_json(io.load_json(Path(path)))


def parse_group(spec: str) -> FiniteGroup:
    if match := re.fullmatch(r"[zZ](\d+)", spec):
        return FiniteGroup.cyclic(int(match.group(1)))
    return io.group_from_json(io.load_json(Path(spec)))


def parse_cocycle(spec: str, group: FiniteGroup, cyclic: bool, tol: float) -> ThreeCocycle:
    if spec == "trivial":
        return trivial_cocycle(group)
    if spec == "nontrivial" or spec.startswith("p="):
        if not cyclic:
            raise ParameterError("named cocycle classes are only available for cyclic groups; pass a cocycle file")
        try:
            p = 1 if spec == "nontrivial" else int(spec[2:])
        except ValueError as e:
            raise ParameterError(f"invalid cocycle class {spec!r}") from e
        return cyclic_cocycle(group.order, p)
    data = io.load_json(Path(spec))
    values = io.cocycle_values_from_json(data, group)
    return ThreeCocycle(group, values, name=Path(spec).stem, tol=tol)


# commands


def cmd_analyze(args: argparse.Namespace, config: RunConfig):
    if args.family:
        family, hints, star = _load_family(args)
        analysis = analyze_family(family, hints, star, tol=config.tol, seed=config.seed, cap=config.cap)
    else:
        analysis = analyze_builtin(args.builtin, config.tol, config.seed, config.cap)
    checks = [
        residual_check(
            "associator_residual", max(analysis.table.residuals.values(), default=0.0), "anomaly", config.tol
        ),
        verdict_check(
            "cohomology_class",
            analysis.table.cohomology_class != "unknown",
            "anomaly",
            detail=f"{analysis.table.cohomology_class} (p={analysis.table.class_index})",
        ),
    ]
    checks += [
        residual_check(f"axiom_{name}", value, "structure", config.tol)
        for name, value in analysis.axioms.residuals.items()
    ]
    return checks, [], analysis_data(analysis)


def cmd_fusion(args: argparse.Namespace, config: RunConfig):
    family, hints, _ = _load_family(args)
    with stage("fusion"):
        fusions = solve_family_fusions(family, hints, config.tol, config.seed)
    checks = [
        residual_check(f"fusion_{a}{b}", sol.residual, "anomaly", config.tol, detail="hinted" if sol.hinted else "")
        for (a, b), sol in sorted(fusions.items())
    ]
    return checks, [], io.fusions_to_json(family.name, fusions)


def cmd_associator(args: argparse.Namespace, config: RunConfig):
    family, hints, _ = _load_family(args)
    if args.fusion:
        data = _payload(args.fusion)
        if data.get("family") and family.name and data["family"] != family.name:
            raise InputError(f"fusion file is for family {data['family']!r}, not {family.name!r}")
        fusions = io.fusions_from_json(data, family)
    else:
        with stage("fusion"):
            fusions = solve_family_fusions(family, hints, config.tol, config.seed)
    with stage("associator"):
        table = associator(family, fusions, config.tol)
    checks = [
        residual_check(f"omega_{a}{b}{c}", r, "anomaly", config.tol) for (a, b, c), r in sorted(table.residuals.items())
    ]
    checks.append(
        verdict_check(
            "cohomology_class", table.cohomology_class != "unknown", "anomaly", detail=table.cohomology_class
        )
    )
    return checks, [], io.associator_to_json(table)


def _load_catalog(spec: str, algebra: PreBialgebra) -> list[Representation] | None:
    """None for a catalog built from the algebra, else the builtin or a catalog file."""
    if spec == "auto":
        return None
    if spec == "czy":
        return [Representation(algebra, rep.matrices, name=rep.name) for rep in czy.psi_representations().values()]
    return io.catalog_from_json(_payload(spec), algebra)


def cmd_rep_decompose(args: argparse.Namespace, config: RunConfig):
    P = _load_prebialgebra(args.algebra) if args.algebra else dual(czy.czy_algebra())
    if args.unitize:
        P = unitize(P)
    catalog = _load_catalog(args.catalog, P)
    with stage("module decomposition"):
        regular, rows = decomposition_table(P, catalog, config.tol, config.seed)
    checks = [
        residual_check("regular_decomposition", regular.residual, "modules", config.tol),
        verdict_check("dimension_count", regular.total_dim() == P.dim, "modules"),
    ]
    data = {
        "algebra_dim": P.dim,
        "unitized": bool(args.unitize),
        "regular": regular.multiplicities(),
        "regular_dims": sorted(regular.dims, reverse=True),
        "modules": [r.as_dict() for r in rows],
    }
    return checks, [], data


def cmd_rep(args: argparse.Namespace, config: RunConfig):
    if args.action == "decompose":
        return cmd_rep_decompose(args, config)
    keep = args.keep.split(",") if args.keep else None
    if args.algebra:
        P = _load_prebialgebra(args.algebra)
        catalog = None
    else:
        P = czy.czy_algebra()
        catalog = list(czy.psi_representations().values())
        keep = keep or CZY_SEMION_SECTOR
    with stage("representations"):
        tables = representation_tables(P, catalog, keep, config.tol, config.seed)
    checks = [
        residual_check("regular_decomposition", tables.regular.residual, "modules", config.tol),
        verdict_check(
            "dimension_count", tables.regular.total_dim() == P.dim + int(not tables.dual_unit_found), "modules"
        ),
    ]
    if tables.ring is not None:
        checks.append(verdict_check("rep_A_associative", tables.ring.associativity_defect() == 0, "fusion"))
    if tables.sector is not None:
        checks.append(verdict_check("sector_associative", tables.sector.associativity_defect() == 0, "fusion"))
    data = {
        "radical_dim": tables.radical_dim,
        "block_sizes": tables.block_sizes,
        "dual_unit_found": tables.dual_unit_found,
        "dual_radical_dim": tables.dual_radical_dim,
        "regular": tables.regular.multiplicities(),
        "modules": [r.as_dict() for r in tables.rows],
        "dual_fusion": {f"{a}x{b}": counts for (a, b), counts in sorted(tables.dual_fusion.items())},
    }
    if tables.ring is not None:
        data["rep_A_fusion"] = {"labels": list(tables.ring.labels), "N": tables.ring.N.tolist()}
    if tables.sector is not None:
        data["sector"] = {"labels": list(tables.sector.labels), "N": tables.sector.N.tolist()}
    return checks, [], data


def _rfp_checks(report, config: RunConfig) -> list[Check]:
    checks = [residual_check(f"rfp_{name}", value, "rfp", config.tol) for name, value in report.residuals.items()]
    checks.append(
        verdict_check(
            "rfp_blocks_identified", not report.unidentified, "rfp", detail=", ".join(map(str, report.unidentified))
        )
    )
    return checks


def cmd_rfp_build(args: argparse.Namespace, config: RunConfig):
    artifacts = []
    if args.algebra:
        P = _load_prebialgebra(args.algebra)
        if not args.psi:
            raise ParameterError("--psi is required with --algebra")
        psi = io.representation_from_json(_payload(args.psi), unitize(dual(P)))
        with stage("rfp construction"):
            construction = build_rfp_tensor(P, psi, tol=config.tol, seed=config.seed)
        with stage("canonical form"):
            report = verify_rfp(vertical_canonical_form(construction.tensor, config.tol, config.seed), config.tol)
        checks = _rfp_checks(report, config)
        data = {"weights": construction.weights, "fusion": construction.ring.N.tolist()}
    else:
        outcome = czy_rfp(tol=config.tol, seed=config.seed, cap=config.cap, fit=args.fit)
        construction = outcome.construction
        checks = _rfp_checks(outcome.report, config)
        checks += [residual_check(f"spectrum_{2 * n}", r, "rfp", config.tol) for n, r in outcome.spectrum_residuals.items()]
        checks += [residual_check(f"trace_{n}", r, "rfp", config.tol) for n, r in outcome.traces.items()]
        checks += [residual_check(f"hermitian_{n}", r, "rfp", config.tol) for n, r in outcome.hermiticity.items()]
        checks += [residual_check(f"interchange_{n}", r, "rfp", config.tol) for n, r in outcome.interchange.items()]
        data = {"weights": construction.weights, "fusion": construction.ring.N.tolist()}
        if outcome.fit is not None:
            data["local_unitary_fit"] = {"residual": outcome.fit.residual, "success": outcome.fit.success}
    tensor = construction.tensor
    data.update({"physical_dim": tensor.d_out, "bond_dim": tensor.bond})
    if config.out is not None:
        io.write_json(io.tensor_to_json(tensor), config.out)
        artifacts.append(str(config.out))
    return checks, artifacts, data


def cmd_rfp_verify(args: argparse.Namespace, config: RunConfig):
    tensor = io.tensor_from_json(io.load_json(Path(args.tensor)))
    with stage("canonical form"):
        cf = vertical_canonical_form(tensor, config.tol, config.seed)
        report = verify_rfp(cf, config.tol, config.seed)
    checks = _rfp_checks(report, config)
    for n in range(1, args.nmax + 1):
        if tensor.d_out**n > config.cap:
            logger.info(f"stopping ring checks at N={n - 1}: dimension {tensor.d_out}^{n} exceeds the cap")
            break
        rho = mpdo_contract(tensor, n, config.cap).matrix
        checks.append(residual_check(f"hermitian_{n}", float(np.abs(rho - rho.conj().T).max()), "rfp", config.tol))
        lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
        checks.append(verdict_check(f"positive_{n}", lowest >= -POSITIVITY_TOL, "rfp", lowest))
    data = {
        "is_rfp": report.is_rfp,
        "blocks": [{"label": b.label, "dim": b.tensor.d_out, "weight": b.weight} for b in cf.blocks],
        "multiplicities": report.multiplicities(len(cf.blocks)).tolist(),
    }
    return checks, [], data


def cmd_models(args: argparse.Namespace, config: RunConfig):
    n, which = args.n, args.check
    checks: list[Check] = []
    data: dict = {"n_sites": n}
    if which in ("all", "equivalences"):
        for name, r in equivalence_residuals(n).items():
            checks.append(residual_check(name, r, "spin_chains", config.tol))
    if which in ("all", "charges"):
        residuals = z2_residuals(n, config.tol)
        commutator = residuals.pop("charge_commutator")
        checks += [residual_check(name, r, "spin_chains", config.tol) for name, r in residuals.items()]
        checks.append(verdict_check("charges_do_not_commute", commutator > config.tol, "spin_chains", commutator))
    if which in ("all", "channel"):
        report = semion_channel_check(n, config.tol)
        checks += [residual_check(name, r, "channel", config.tol) for name, r in report.residuals.items()]
    if which in ("all", "mpo"):
        checks += [residual_check(name, r, "spin_chains", config.tol) for name, r in czy_mpo_residuals(n, config.cap).items()]
    return checks, [], data


def cmd_cocycle(args: argparse.Namespace, config: RunConfig):
    group = parse_group(args.group)
    cyclic = re.fullmatch(r"[zZ](\d+)", args.group) is not None
    omega = parse_cocycle(args.omega, group, cyclic, config.tol)
    if args.emit == "prebialgebra":
        payload = io.prebialgebra_to_json(group_prebialgebra(omega).growing)
        return [], [], payload
    if args.emit == "family":
        return [], [], io.family_to_json(group_cocycle_mpo(omega, config.tol).family)
    report = analyze_cocycle(omega, args.max_sites, config.tol, config.cap)
    checks = [residual_check(name, r, "groups", config.tol) for name, r in report.residuals.items()]
    checks.append(
        verdict_check(
            "anomaly_matches_class",
            report.cohomology_class == report.associator_class,
            "groups",
            detail=f"{report.cohomology_class[0]} (p={report.cohomology_class[1]})",
        )
    )
    data = {
        "cocycle": report.cocycle,
        "normalized": omega.normalized,
        "values": io.cocycle_to_json(omega.values, omega.normalized)["values"],
        "injective": {str(g): v for g, v in report.injective.items()},
        "cohomology_class": list(report.cohomology_class),
        "counit_found": report.counit_found,
    }
    if args.rfp:
        if not omega.normalized:
            raise ParameterError("the weak Hopf fixed point needs a normalized cocycle")
        fixed = group_rfp(omega, (2,), config.tol, config.seed, config.cap)
        checks += [
            verdict_check(f"rfp_positive_{n}", v >= -POSITIVITY_TOL, "groups", v)
            for n, v in fixed.min_eigenvalues.items()
        ]
        checks += [residual_check(f"rfp_{k}", v, "groups", config.tol) for k, v in fixed.report.residuals.items()]
        data["rfp"] = {"physical_dim": fixed.tensor.d_out, "bond_dim": fixed.tensor.bond}
    return checks, [], data


def cmd_reproduce(args: argparse.Namespace, config: RunConfig):
    if args.only and args.only not in GROUPS:
        raise ParameterError(f"unknown group {args.only!r}; choose one of {', '.join(GROUPS)}")
    checks, data = run_suite(config, only=args.only, perturb=args.perturb)
    return checks, [], data


# parser


def _family_source(parser: argparse.ArgumentParser, builtins: tuple[str, ...]) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--builtin", choices=builtins, default="czy", help="Compiled-in example")
    source.add_argument("--family", help="Family JSON file")
    parser.add_argument("--hint", help="Fusion JSON whose X matrices seed the solver")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Numerical tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=None, help="Random seed (default 0)")
    common.add_argument("--cap", type=int, default=None, help="Largest dense dimension (default 4096)")
    common.add_argument("--out", type=Path, default=None, help="Write the output JSON here")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="as_json", action="store_const", const=True, default=None, help="JSON report")
    fmt.add_argument("--text", dest="as_json", action="store_const", const=False, help="Plain-text report")
    common.add_argument("--debug", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="mposym", description="Algebraic structure and fixed points of MPO symmetries"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="Full symmetry analysis of an MPO family")
    _family_source(p, BUILTIN_FAMILIES + BUILTIN_COCYCLES)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("fusion", parents=[common], help="Solve the fusion tensors of a family")
    _family_source(p, BUILTIN_FAMILIES)
    p.set_defaults(handler=cmd_fusion)

    p = sub.add_parser("associator", parents=[common], help="Associator and its cohomology class")
    _family_source(p, BUILTIN_FAMILIES)
    p.add_argument("--fusion", help="Fusion JSON written by the fusion command; skips the solver")
    p.set_defaults(handler=cmd_associator)

    p = sub.add_parser("rep", parents=[common], help="Representation tables of a pre-bialgebra and its dual")
    p.add_argument("action", nargs="?", choices=["tables", "decompose"], default="tables")
    p.add_argument("--algebra", help="Pre-bialgebra JSON file (default: builtin czy, its dual for decompose)")
    p.add_argument("--keep", help="Comma-separated module labels of the semisimplified sector")
    p.add_argument("--unitize", action="store_true", help="Adjoin a unit before decomposing")
    p.add_argument("--catalog", default="auto", help="Reference modules for decompose: auto, czy, or a catalog JSON")
    p.set_defaults(handler=cmd_rep)

    rfp = sub.add_parser("rfp", help="Renormalization fixed points")
    rfp_sub = rfp.add_subparsers(dest="rfp_command", required=True)
    p = rfp_sub.add_parser("build", parents=[common], help="Build the fixed-point tensor")
    p.add_argument("--algebra", help="Pre-bialgebra JSON file (default: builtin czy)")
    p.add_argument("--psi", help="Representation JSON of the unitized dual")
    p.add_argument("--fit", action="store_true", help="Also fit a local unitary to the CZY state")
    p.set_defaults(handler=cmd_rfp_build, out_is_artifact=True)
    p = rfp_sub.add_parser("verify", parents=[common], help="Check the fixed-point criterion of a tensor")
    p.add_argument("--tensor", required=True, help="MPO tensor JSON file")
    p.add_argument("--nmax", type=int, default=3, help="Largest ring checked for hermiticity and positivity")
    p.set_defaults(handler=cmd_rfp_verify)

    p = sub.add_parser("models", parents=[common], help="Spin-chain, channel and MPO identities")
    p.add_argument("system", choices=["czy"])
    p.add_argument("--n", type=int, default=8, help="Number of sites")
    p.add_argument("--check", choices=MODEL_CHECKS, default="all")
    p.set_defaults(handler=cmd_models)

    p = sub.add_parser("cocycle", parents=[common], help="Group-cocycle MPOs and pre-bialgebras")
    p.add_argument("--group", default="z2", help="z2, zN, or a group JSON file")
    p.add_argument("--omega", default="nontrivial", help="trivial, nontrivial, p=K, or a cocycle JSON file")
    p.add_argument("--emit", choices=["report", "prebialgebra", "family"], default="report")
    p.add_argument("--max-sites", type=int, default=4, help="Largest ring for the group law")
    p.add_argument("--rfp", action="store_true", help="Also build the weak Hopf fixed-point MPDO")
    p.set_defaults(handler=cmd_cocycle)

    p = sub.add_parser("reproduce-paper", parents=[common], help="Run the acceptance suite")
    p.add_argument("--only", help="Run a single check group")
    p.add_argument("--perturb", type=float, default=0.0, help="Perturb A_1 by this amount")
    p.set_defaults(handler=cmd_reproduce)
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(args.debug)
    try:
        config = RunConfig.from_env(
            tol=args.tol, seed=args.seed, cap=args.cap, out=args.out, as_json=args.as_json, debug=args.debug
        )
        checks, artifacts, data = args.handler(args, config)
    except INPUT_ERRORS as e:
        logger.error(f"input error: {e}")
        return EXIT_INPUT
    except NUMERICAL_ERRORS as e:
        logger.error(f"numerical degeneracy: {e}")
        return EXIT_NUMERICAL
    except MposymError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED_CHECK
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.error(f"input error: {type(e).__name__}: {e}")
        return EXIT_INPUT

    command = args.command if args.command != "rfp" else f"rfp {args.rfp_command}"
    if getattr(args, "emit", "report") != "report":
        if config.out is not None:
            io.write_json(data, config.out)
        else:
            print(json.dumps(data, indent=2))
        return EXIT_OK
    report = build_report(command, config, checks, artifacts, data)
    # --out already holds the artifact; the report goes to stdout
    emit_report(report, replace(config, out=None) if getattr(args, "out_is_artifact", False) else config)
    code = exit_code(checks)
    if code:
        logger.warning(f"{sum(not c.passed for c in checks)} check(s) failed")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
