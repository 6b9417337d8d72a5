import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.algebra.mpo_algebra import solve_family_fusions
from mposym.core import io
from mposym.errors import InputError, ShapeError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.group_cocycle import group_cocycle_mpo, group_fusions, z2_nontrivial


def test_half_integers_are_written_exactly():
    z = io.complex_to_json(0.5 + 1e-16 - (1.0 - 1e-17) * 1j)
    assert z == {"re": 0.5, "im": -1.0}
    assert io.complex_to_json(0.3)["re"] == 0.3


def test_complex_rejects_garbage():
    with pytest.raises(InputError):
        io.complex_from_json({"re": 1.0})


def test_prebialgebra_survives_json(czy_algebra):
    text = json.dumps(io.prebialgebra_to_json(czy_algebra))
    back = io.prebialgebra_from_json(json.loads(text))
    assert_allclose(back.lam, czy_algebra.lam)
    assert_allclose(back.delta, czy_algebra.delta)
    assert_allclose(back.unit, czy_algebra.unit)
    assert_allclose(back.star, czy_algebra.star)
    assert back.labels == czy_algebra.labels


def test_linear_star_is_rejected(czy_algebra):
    data = io.prebialgebra_to_json(czy_algebra)
    data["star"]["conjugate"] = False
    with pytest.raises(InputError):
        io.prebialgebra_from_json(data)


def test_structure_entry_out_of_range():
    data = {"dim": 2, "lambda": [{"i": 0, "j": 0, "k": 2, "re": 1.0, "im": 0.0}]}
    with pytest.raises(InputError):
        io.prebialgebra_from_json(data)


def test_family_file_keeps_tensors_and_boundary():
    family = czy.czy_family()
    back = io.family_from_json(json.loads(json.dumps(io.family_to_json(family))))
    assert back.basis == family.basis
    for a in (0, 1):
        assert back.tensors[a].allclose(family.tensors[a], 0.0)


def test_group_order_mismatch():
    data = io.group_to_json(FiniteGroup.cyclic(3))
    data["order"] = 4
    with pytest.raises(InputError):
        io.group_from_json(data)


def test_missing_cocycle_values_default_to_one():
    G = FiniteGroup.cyclic(2)
    values = io.cocycle_values_from_json({"values": [{"g": 1, "h": 1, "k": 1, "re": -1.0, "im": 0.0}]}, G)
    assert_allclose(values, z2_nontrivial().values)


def test_fusion_hints_from_solutions():
    fusions = group_fusions(group_cocycle_mpo(z2_nontrivial()))
    hints = io.fusion_hints_from_json(io.fusions_to_json("z2", fusions))
    assert set(hints) == set(fusions)
    for key, X in hints.items():
        assert_allclose(X, fusions[key].X)


def test_load_json_errors(tmp_path):
    with pytest.raises(InputError):
        io.load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        io.load_json(bad)


def test_write_json_creates_parents(tmp_path):
    path = tmp_path / "nested" / "out.json"
    io.write_json({"x": [1, 2]}, path)
    assert io.load_json(path) == {"x": [1, 2]}


def test_representation_roundtrip(psis, czy_dual_plus):
    rep = psis["P_0"]
    back = io.representation_from_json(io.representation_to_json(rep), czy_dual_plus)
    assert back.name == "P_0"
    assert_allclose(back.matrices, rep.matrices)
    assert np.isclose(back.residual(), 0.0)


@pytest.mark.parametrize("index", [{"i": -1}, {"beta": 2}, {"alpha": -2}])
def test_tensor_entry_out_of_range(index):
    entry = {"i": 0, "j": 0, "alpha": 0, "beta": 0, "re": 1.0, "im": 0.0} | index
    data = {"name": "A", "d_out": 2, "d_in": 2, "bond": 2, "entries": [entry]}
    with pytest.raises(InputError):
        io.tensor_from_json(data)


def test_fusion_solutions_survive_json():
    family = czy.czy_family()
    fusions = solve_family_fusions(family, czy.czy_fusion_hints())
    back = io.fusions_from_json(json.loads(json.dumps(io.fusions_to_json("czy", fusions))), family)
    assert set(back) == set(fusions)
    for key, sol in fusions.items():
        assert back[key].c == sol.c
        assert back[key].hinted == sol.hinted
        assert_allclose(back[key].Y, sol.Y)
        assert_allclose(back[key].Y_rinv, sol.Y_rinv)


def test_fusion_file_with_wrong_shapes():
    family = czy.czy_family()
    data = io.fusions_to_json("czy", solve_family_fusions(family, czy.czy_fusion_hints()))
    data["solutions"][0]["Y"] = data["solutions"][0]["Y"][:1]
    with pytest.raises(ShapeError):
        io.fusions_from_json(data, family)
