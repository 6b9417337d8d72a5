import numpy as np
import pytest

from mposym.algebra.prebialgebra import check_axioms, check_weak_hopf
from mposym.errors import NotACocycleError, PreconditionError
from mposym.groups import FiniteGroup
from mposym.models.group_cocycle import (
    ThreeCocycle,
    analyze_cocycle,
    coboundary,
    cyclic_cocycle,
    czy_isomorphism,
    group_cocycle_mpo,
    group_law_residual,
    group_prebialgebra,
    operator_representation,
    trivial_cocycle,
    twisted,
    z2_nontrivial,
)


def test_values_must_be_phases():
    with pytest.raises(NotACocycleError):
        ThreeCocycle(FiniteGroup.cyclic(2), 2 * np.ones((2, 2, 2)))


def test_cocycle_identity_enforced():
    values = np.ones((2, 2, 2))
    values[0, 0, 0] = -1
    with pytest.raises(NotACocycleError):
        ThreeCocycle(FiniteGroup.cyclic(2), values)


def test_z2_sectors_injectivity():
    mpo = group_cocycle_mpo(z2_nontrivial())
    assert mpo.injective == {0: False, 1: True}


@pytest.mark.parametrize("n_sites", [2, 3, 4])
def test_group_law(n_sites, tol):
    assert group_law_residual(group_cocycle_mpo(z2_nontrivial()), n_sites) < tol


def test_z2_analysis(tol):
    report = analyze_cocycle(z2_nontrivial(), 3, tol)
    assert report.passed, report.residuals
    assert report.associator_class == ("nontrivial", 1)
    assert not report.counit_found


def test_boundary_coproduct_is_weak_hopf(tol):
    algebras = group_prebialgebra(z2_nontrivial())
    assert check_weak_hopf(algebras.boundary, algebras.hopf, tol).ok
    unit = algebras.boundary.unit
    assert np.abs(algebras.boundary.coproduct(unit) - np.outer(unit, unit)).max() > 0.1
    assert check_axioms(algebras.growing, tol).kind == "pre-bialgebra"


def test_two_site_operators_are_faithful():
    rep = operator_representation(group_prebialgebra(z2_nontrivial()))
    assert rep.residual() < 1e-12
    assert rep.checked().faithful


def test_isomorphic_to_czy(tol):
    report = czy_isomorphism((2, 3), tol)
    assert report.passed, report.residuals


def test_unnormalized_cocycle_rejected():
    beta = np.array([[1, 1j], [1, 1]])
    omega = twisted(z2_nontrivial(), beta)
    assert not omega.normalized
    assert omega.cohomology_class() == ("nontrivial", 1)
    with pytest.raises(PreconditionError):
        group_prebialgebra(omega)


def test_coboundary_is_trivial(rng):
    beta = np.exp(2j * np.pi * rng.random((3, 3)))
    assert coboundary(FiniteGroup.cyclic(3), beta).cohomology_class() == ("trivial", 0)


def test_trivial_cocycle_has_trivial_anomaly(tol):
    report = analyze_cocycle(trivial_cocycle(FiniteGroup.cyclic(2)), 2, tol)
    assert report.associator_class == ("trivial", 0)
    assert group_cocycle_mpo(trivial_cocycle(FiniteGroup.cyclic(2))).injective == {0: False, 1: False}


def test_z3_class(tol):
    omega = cyclic_cocycle(3, 1)
    assert omega.cohomology_class() == ("nontrivial", 1)
    assert analyze_cocycle(omega, 2, tol).passed
