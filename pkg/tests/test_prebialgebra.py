from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.algebra.prebialgebra import (
    PreBialgebra,
    change_basis,
    check_axioms,
    check_star,
    dual,
    find_counit,
    find_unit,
    unitize,
    with_unit,
)
from mposym.errors import InversionError, PreconditionError, ShapeError
from mposym.models import czy


def group_algebra_z2() -> PreBialgebra:
    """C[Z_2] with the group-like coproduct."""
    lam = np.zeros((2, 2, 2))
    delta = np.zeros((2, 2, 2))
    for g in range(2):
        delta[g, g, g] = 1
        for h in range(2):
            lam[g, h, (g + h) % 2] = 1
    return PreBialgebra(lam=lam, delta=delta)


def test_czy_is_a_unital_star_prebialgebra(czy_algebra, tol):
    report = check_axioms(czy_algebra, tol)
    assert report.ok, report.residuals
    assert report.kind == "pre-bialgebra"
    assert "unital" in report.tags
    assert "star" in report.tags


def test_czy_has_no_counit(czy_algebra, tol):
    assert find_counit(czy_algebra, tol) is None


def test_czy_unit_is_e3(czy_algebra, tol):
    assert_allclose(find_unit(czy_algebra, tol), np.eye(8)[2], atol=tol)


def test_czy_multiplication_table_spot_checks(czy_algebra):
    e = np.eye(8)
    # e3 is the unit; e5 e8 lands in sector 0
    assert_allclose(czy_algebra.multiply(e[2], e[6]), e[6])
    product = czy_algebra.multiply(e[4], e[7])
    assert np.all(product[4:] == 0)


def test_positivity_witness(czy_algebra):
    y = czy.POSITIVITY_WITNESS
    assert_allclose(czy_algebra.multiply(y, czy_algebra.apply_star(y)), czy.POSITIVE_ELEMENT, atol=1e-12)


def test_two_site_operators_are_a_star_representation(czy_algebra, tol):
    report = check_star(czy_algebra, czy.czy_operators(), tol)
    assert report.ok, report.residuals


def test_dual_swaps_structure(czy_algebra, czy_dual):
    assert_allclose(czy_dual.lam[:, :, 0], czy_algebra.delta[0])
    assert_allclose(czy_dual.delta[0], czy_algebra.lam[:, :, 0])
    assert czy_dual.labels[0] == "e^1"
    assert_allclose(dual(czy_dual).lam, czy_algebra.lam)


def test_dual_of_czy_has_no_unit(czy_dual, tol):
    assert find_unit(czy_dual, tol) is None


def test_unitize_adjoins_identity(czy_dual, tol):
    plus = unitize(czy_dual)
    assert plus.dim == 9
    assert plus.adjoined_unit
    assert plus.delta is None
    assert check_axioms(plus, tol).ok
    assert_allclose(find_unit(plus, tol), np.eye(9)[0], atol=tol)


def test_group_algebra_is_counital(tol):
    P = with_unit(group_algebra_z2(), tol)
    assert_allclose(P.unit, [1, 0], atol=tol)
    assert_allclose(P.counit, [1, 1], atol=tol)
    assert check_axioms(P, tol).tags == ["unital", "counital"]


def test_broken_associativity_is_reported_not_raised(tol):
    lam = np.zeros((2, 2, 2))
    lam[0, 0, 1] = 1
    lam[1, 0, 0] = 1
    report = check_axioms(PreBialgebra(lam=lam), tol)
    assert not report.ok
    assert report.kind == "algebra-only"
    assert report.residuals["associativity"] > 0


def test_change_basis_preserves_axioms(czy_algebra, rng):
    R = rng.normal(size=(8, 8)) + 8 * np.eye(8)
    moved = change_basis(czy_algebra, R)
    report = check_axioms(moved, 1e-8)
    assert report.ok, report.residuals
    assert_allclose(moved.multiply(moved.unit, moved.basis_vector(3)), moved.basis_vector(3), atol=1e-10)


def test_change_basis_rejects_singular(czy_algebra):
    with pytest.raises(InversionError):
        change_basis(czy_algebra, np.zeros((8, 8)))
    with pytest.raises(ShapeError):
        change_basis(czy_algebra, np.eye(3))


def test_coproduct_needs_delta():
    with pytest.raises(PreconditionError):
        PreBialgebra(lam=np.zeros((1, 1, 1))).coproduct(np.ones(1))


def test_iterated_coproduct_matches_growth(czy_algebra):
    x = czy_algebra.basis_vector(4)
    twice = czy_algebra.iterated_coproduct(x, 3)
    expected = np.einsum("jk,jab->abk", czy_algebra.coproduct(x), czy_algebra.delta)
    assert_allclose(twice, expected)


def test_small_perturbation_of_the_product_breaks_associativity(czy_algebra, tol):
    eps = 1e-3
    lam = czy_algebra.lam.copy()
    # e5 e5 = eps e1 instead of 0
    lam[4, 4, 0] += eps
    report = check_axioms(replace(czy_algebra, lam=lam), tol)
    assert not report.ok
    assert eps / 2 <= report.residuals["associativity"] <= 4 * eps


def test_swapped_star_fails(czy_algebra, tol):
    star = czy.czy_star()
    # e5* = e7 instead of e8
    star[:, 4] = 0
    star[6, 4] = 1.0
    report = check_star(replace(czy_algebra, star=star), czy.czy_operators(), tol)
    assert not report.ok
    assert report.residuals["star_representation"] > 0.5


def test_e2_annihilates_the_dual_from_the_left(czy_dual):
    e2 = czy_dual.basis_vector(1)
    for j in range(czy_dual.dim):
        assert_allclose(czy_dual.multiply(e2, czy_dual.basis_vector(j)), np.zeros(czy_dual.dim), atol=1e-14)
    assert np.abs(czy_dual.lam).sum() > 0


def test_basis_change_gives_matrix_units():
    units = czy.czy_matrix_units()
    assert_allclose(units.lam, czy.matrix_unit_constants(), atol=1e-12)
    # E_11 + E_22 in both blocks
    assert_allclose(units.unit, [1, 0, 0, 1, 1, 0, 0, 1], atol=1e-12)
    E = units.basis_vector
    assert_allclose(units.multiply(E(1), E(2)), E(0), atol=1e-12)
    assert_allclose(units.multiply(E(2), E(1)), E(3), atol=1e-12)
    assert_allclose(units.multiply(E(5), E(6)), E(4), atol=1e-12)
    assert_allclose(units.multiply(E(1), E(5)), np.zeros(8), atol=1e-12)
    assert check_axioms(units, 1e-8).ok
