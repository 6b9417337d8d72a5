import json

import numpy as np
import pytest

from mposym.cli import main
from mposym.cli.main import EXIT_FAILED_CHECK, EXIT_INPUT, EXIT_OK, build_parser, run
from mposym.core import io
from mposym.models import czy


def load(path):
    with open(path) as f:
        return json.load(f)


def failing(report: dict) -> set[str]:
    return {c["name"] for c in report["checks"] if c["status"] != "pass"}


def test_flags_follow_the_subcommand():
    args = build_parser().parse_args(["models", "czy", "--n", "4", "--tol", "1e-8", "--text"])
    assert args.n == 4
    assert args.tol == 1e-8
    assert args.as_json is False


def test_models_equivalences(tmp_path):
    out = tmp_path / "models.json"
    assert run(["models", "czy", "--n", "4", "--check", "equivalences", "--out", str(out)]) == EXIT_OK
    report = load(out)
    assert report["command"] == "models"
    assert {c["name"] for c in report["checks"]} == {"levin_gu_to_h2", "h2_to_xx"}
    assert report["config"]["tol"] == 1e-9


def test_models_odd_sites_is_an_input_error():
    assert run(["models", "czy", "--n", "5"]) == EXIT_INPUT


def test_bad_tolerance_is_an_input_error():
    assert run(["models", "czy", "--n", "4", "--tol", "-1"]) == EXIT_INPUT


def test_missing_family_file(tmp_path):
    assert run(["fusion", "--family", str(tmp_path / "missing.json")]) == EXIT_INPUT


def test_analyze_onsite_text_report(capsys):
    assert run(["analyze", "--builtin", "z2-onsite", "--text"]) == EXIT_OK
    text = capsys.readouterr().out
    assert text.startswith("mposym analyze")
    assert "PASS  cohomology_class" in text


def test_cocycle_emits_prebialgebra(capsys):
    assert run(["cocycle", "--group", "z2", "--omega", "nontrivial", "--emit", "prebialgebra"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 8
    assert "counit" not in data


def test_cocycle_named_class_needs_cyclic_group(tmp_path):
    group = tmp_path / "z2.json"
    group.write_text(json.dumps({"order": 2, "mult": [[0, 1], [1, 0]]}))
    assert run(["cocycle", "--group", str(group), "--omega", "nontrivial"]) == EXIT_INPUT


def test_cocycle_report(tmp_path):
    out = tmp_path / "cocycle.json"
    assert run(["cocycle", "--max-sites", "3", "--out", str(out)]) == EXIT_OK
    report = load(out)
    assert report["data"]["cohomology_class"] == ["nontrivial", 1]
    assert report["data"]["counit_found"] is False


def test_reproduce_single_group(tmp_path):
    out = tmp_path / "channel.json"
    assert run(["reproduce-paper", "--only", "channel", "--out", str(out)]) == EXIT_OK
    report = load(out)
    assert list(report["data"]["groups"]) == ["channel"]
    assert not failing(report)


def test_reproduce_unknown_group():
    assert run(["reproduce-paper", "--only", "everything"]) == EXIT_INPUT


def test_perturbation_breaks_only_the_fusion_checks(tmp_path):
    out = tmp_path / "anomaly.json"
    assert run(["reproduce-paper", "--only", "anomaly", "--perturb", "1e-3", "--out", str(out)]) == EXIT_FAILED_CHECK
    assert failing(load(out)) == {"fusion_tensors", "associator_cocycle"}


@pytest.mark.slow
def test_rfp_build_then_verify(tmp_path, capsys):
    tensor = tmp_path / "rfp_tensor.json"
    assert run(["rfp", "build", "--out", str(tensor)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "rfp build"
    assert report["artifacts"] == [str(tensor)]
    assert report["data"]["physical_dim"] == 4

    verified = tmp_path / "verify.json"
    assert run(["rfp", "verify", "--tensor", str(tensor), "--nmax", "2", "--out", str(verified)]) == EXIT_OK
    data = load(verified)["data"]
    assert data["is_rfp"]
    assert data["multiplicities"] == [[[1, 1], [1, 1]], [[1, 1], [1, 1]]]
    names = {c["name"] for c in load(verified)["checks"]}
    assert {"hermitian_2", "positive_2"} <= names


def test_associator_reads_a_saved_fusion_file(tmp_path):
    fusion = tmp_path / "fusion.json"
    omega = tmp_path / "omega.json"
    assert run(["fusion", "--builtin", "czy", "--out", str(fusion)]) == EXIT_OK
    assert run(["associator", "--fusion", str(fusion), "--out", str(omega)]) == EXIT_OK
    data = load(omega)["data"]
    assert data["cohomology_class"] == "nontrivial"
    normalized = {(e["a"], e["b"], e["c"]): e["re"] for e in data["normalized"]}
    assert normalized.pop((1, 1, 1)) == pytest.approx(-1.0)
    assert all(w == pytest.approx(1.0) for w in normalized.values())


def test_incomplete_fusion_file(tmp_path):
    fusion = tmp_path / "fusion.json"
    assert run(["fusion", "--builtin", "czy", "--out", str(fusion)]) == EXIT_OK
    report = load(fusion)
    report["data"]["solutions"] = report["data"]["solutions"][:-1]
    fusion.write_text(json.dumps(report))
    assert run(["associator", "--fusion", str(fusion)]) == EXIT_INPUT


def test_family_file_with_hint_file(tmp_path):
    family = tmp_path / "family.json"
    hints = tmp_path / "hints.json"
    out = tmp_path / "fusion.json"
    io.write_json(io.family_to_json(czy.czy_family()), family)
    assert run(["fusion", "--builtin", "czy", "--out", str(hints)]) == EXIT_OK
    assert run(["fusion", "--family", str(family), "--hint", str(hints), "--out", str(out)]) == EXIT_OK
    assert all(sol["hinted"] for sol in load(out)["data"]["solutions"])


def test_rep_decompose_unitized_dual(tmp_path):
    out = tmp_path / "table.json"
    assert run(["rep", "decompose", "--unitize", "--catalog", "czy", "--out", str(out)]) == EXIT_OK
    data = load(out)["data"]
    assert data["algebra_dim"] == 9
    assert data["regular"] == {"P_0": 1, "P_1": 1, "P_2": 2}
    rows = {row["label"]: row for row in data["modules"]}
    assert rows["S_0"]["simple"] and not rows["S_0"]["projective"]
    assert rows["P_2"]["simple"] and rows["P_2"]["projective"]
    assert rows["P_1"]["radical"] == {"S_0": 1}
    assert rows["P_1"]["head"] == "S_1"


def test_rep_decompose_needs_a_unit():
    assert run(["rep", "decompose"]) == EXIT_INPUT


def test_linear_algebra_failures_are_input_errors(monkeypatch):
    def singular(args, config):
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr(main, "cmd_models", singular)
    assert run(["models", "czy", "--n", "4"]) == EXIT_INPUT
