import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.algebra.rep_theory import (
    FusionRing,
    Representation,
    build_catalog,
    decompose_module,
    decompose_regular,
    direct_sum,
    find_isomorphism,
    fusion_multiplicities,
    fusion_table,
    module_isomorphic,
    primitive_idempotents,
    radical,
    radical_part,
    regular_representation,
    semisimplify,
    simple_quotient,
    tensor_representation,
    wedderburn,
)
from mposym.errors import NotSemisimpleError, PreconditionError, ShapeError
from mposym.pipelines import identify

DUAL_FUSION = [
    ("P_0", "P_0", {"P_0": 1, "S_0": 6}),
    ("P_1", "P_1", {"P_1": 1, "S_0": 2}),
    ("P_2", "P_2", {"P_0": 1, "S_0": 1}),
    ("P_0", "P_1", {"P_0": 1, "S_0": 3}),
    ("P_1", "P_0", {"P_0": 1, "S_0": 3}),
    ("P_0", "P_2", {"P_2": 1, "S_0": 4}),
    ("P_2", "P_0", {"P_2": 1, "S_0": 4}),
    ("P_1", "P_2", {"P_2": 1, "S_0": 2}),
    ("P_2", "P_1", {"P_2": 1, "S_0": 2}),
]


def test_catalog_modules_are_representations(catalog):
    for rep in catalog:
        assert rep.residual() < 1e-12, rep.name


def test_czy_is_semisimple(czy_algebra, tol):
    assert len(radical(czy_algebra, tol)) == 0
    wd = wedderburn(czy_algebra, tol)
    assert wd.block_sizes == [2, 2]
    assert_allclose(sum(wd.central_idempotents), czy_algebra.unit, atol=1e-8)


def test_phi_1_is_an_irrep(czy_algebra, phis, tol):
    wd = wedderburn(czy_algebra, tol)
    assert any(module_isomorphic(phis["phi_1"], rep, tol) is not None for rep in wd.irreps)
    assert phis["phi_1"].checked(tol).irreducible


def test_rep_a_fusion_is_all_ones(czy_algebra, tol):
    wd = wedderburn(czy_algebra, tol)
    ring = fusion_multiplicities(wd.irreps, wd.central_idempotents, czy_algebra)
    assert (ring.N == 1).all()
    assert ring.is_transitive()
    assert_allclose(ring.quantum_dims(), [2, 2])
    assert ring.fpdim() == pytest.approx(8.0)


def test_unitized_dual_radical(czy_dual_plus, tol):
    assert len(radical(czy_dual_plus, tol)) == 3
    with pytest.raises(NotSemisimpleError):
        wedderburn(czy_dual_plus, tol)


def test_regular_needs_unit(czy_dual, tol):
    with pytest.raises(PreconditionError):
        radical(czy_dual, tol)
    with pytest.raises(PreconditionError):
        regular_representation(czy_dual, tol)


@pytest.mark.parametrize("which, count", [("czy_algebra", 4), ("czy_dual_plus", 4)])
def test_primitive_idempotents(request, tol, which, count):
    algebra = request.getfixturevalue(which)
    idempotents = primitive_idempotents(algebra, tol)
    assert len(idempotents) == count
    for i, e in enumerate(idempotents):
        for j, f in enumerate(idempotents):
            expected = e if i == j else np.zeros_like(e)
            assert_allclose(algebra.multiply(e, f), expected, atol=1e-7)
    L = regular_representation(algebra, tol).matrices
    total = np.einsum("i,iab->ab", sum(idempotents), L)
    assert_allclose(total, np.eye(algebra.dim), atol=1e-7)


def test_regular_decomposition(czy_dual_plus, catalog, tol):
    regular = decompose_regular(czy_dual_plus, catalog, tol)
    assert sorted(regular.dims, reverse=True) == [3, 2, 2, 2]
    assert regular.multiplicities() == {"P_0": 1, "P_1": 1, "P_2": 2}
    assert regular.total_dim() == 9
    assert regular.residual < tol


def test_heads_and_radicals(psis, catalog, tol):
    assert identify(simple_quotient(psis["P_0"], tol), catalog, tol, 0) == "S_0"
    assert identify(simple_quotient(psis["P_1"], tol), catalog, tol, 0) == "S_1"
    assert identify(radical_part(psis["P_1"], tol), catalog, tol, 0) == "S_0"
    assert radical_part(psis["P_2"], tol) is None


def test_built_catalog_matches_fixtures(czy_dual_plus, catalog, tol):
    simples, projectives = build_catalog(czy_dual_plus, tol)
    assert sorted(p.dim for p in projectives) == [2, 2, 3]
    assert sorted(s.dim for s in simples) == [1, 1, 2]
    for p in projectives:
        assert identify(p, catalog, tol, 0) is not None


@pytest.mark.parametrize(("a", "b", "expected"), DUAL_FUSION)
def test_dual_fusion_rules(psis, catalog, czy_dual, tol, a, b, expected):
    product = tensor_representation(psis[a], psis[b], czy_dual)
    assert product.residual() < 1e-10
    assert decompose_module(product, catalog, tol).multiplicities() == expected


@pytest.mark.parametrize("label", ["S_0", "S_1", "P_0", "P_1", "P_2"])
def test_s1_is_the_tensor_unit(psis, catalog, czy_dual, tol, label):
    for left, right in ((psis[label], psis["S_1"]), (psis["S_1"], psis[label])):
        product = tensor_representation(left, right, czy_dual)
        assert decompose_module(product, catalog, tol).multiplicities() == {label: 1}


def test_semion_sector(catalog, czy_dual, tol):
    keep = ["P_0", "P_2"]
    table = fusion_table(catalog, czy_dual, labels=keep, tol=tol)
    ring = semisimplify(table, keep)
    assert ring.labels == ("P_0", "P_2")
    assert ring.N.tolist() == [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    assert ring.associativity_defect() == 0
    assert ring.commutation_defect() == 0


def test_direct_sum_and_isomorphism(psis, rng):
    rep = direct_sum([psis["S_1"], psis["P_2"]])
    assert rep.dim == 3
    assert rep.name == "S_1+P_2"
    Q = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    moved = Representation(rep.algebra, np.einsum("ij,kjl,lm->kim", np.linalg.inv(Q), rep.matrices, Q))
    T = find_isomorphism(rep.matrices, moved.matrices)
    assert T is not None
    assert not module_isomorphic(psis["P_1"], psis["P_2"])


def test_representation_shape_checks(czy_algebra):
    with pytest.raises(ShapeError):
        Representation(czy_algebra, np.zeros((7, 2, 2)))


def test_fusion_ring_graph():
    ring = FusionRing(("1", "s"), np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]]]))
    assert ring.is_transitive()
    assert ring.graph().has_edge("s", "1")
    with pytest.raises(ShapeError):
        FusionRing(("1",), -np.ones((1, 1, 1)))


def test_restriction_to_a_left_ideal(czy_algebra, phis, tol):
    reg = regular_representation(czy_algebra, tol)
    E = primitive_idempotents(czy_algebra, tol)[0]
    ideal = np.stack([L @ E for L in reg.matrices], axis=1)
    U, s, _ = np.linalg.svd(ideal)
    K = U[:, : int(np.sum(s > 1e-8))]
    piece = reg.restrict(K, name="AE")
    assert piece.dim == 2
    assert piece.residual() <= 1e-9
    assert piece.checked(tol).irreducible
    assert any(module_isomorphic(piece, phi, tol) is not None for phi in phis.values())
