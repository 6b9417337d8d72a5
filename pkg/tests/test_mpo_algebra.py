from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.algebra.mpo_algebra import (
    MpoFamily,
    associator,
    coboundary_values,
    cocycle_class,
    extract_comultiplication,
    extract_multiplication,
    family_prebialgebra,
    normalize_cocycle,
    solve_family_fusions,
    solve_fusion,
)
from mposym.core.tensor import MpoTensor
from mposym.errors import InconsistentFusionError, NoFusionError, NotACocycleError, ShapeError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.group_cocycle import cyclic_cocycle, onsite_family
from mposym.models.pauli import I2, X


@pytest.fixture
def family():
    return czy.czy_family()


@pytest.fixture
def fusions(family, tol):
    return solve_family_fusions(family, czy.czy_fusion_hints(), tol)


def test_czy_basis_order(family):
    assert family.basis == [(0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 1, 2), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
    assert family.is_faithful()


def test_hinted_fusions_intertwine(fusions, tol):
    for (a, b), sol in fusions.items():
        assert sol.hinted
        assert sol.c == (a + b) % 2
        assert sol.residual <= tol
        assert_allclose(sol.Y @ sol.Y_rinv, np.eye(sol.Y.shape[0]), atol=1e-12)


def test_solver_without_hints(family, tol):
    for (a, b), sol in solve_family_fusions(family, None, tol, seed=3).items():
        assert not sol.hinted
        assert sol.residual <= tol
        assert sol.Y.shape[0] == family.tensors[sol.c].bond
        assert_allclose(np.linalg.norm(sol.Y), 1.0)


def test_czy_anomaly(family, fusions, tol):
    table = associator(family, fusions, tol)
    assert table.omega[(1, 1, 1)] == pytest.approx(-1.0, abs=tol)
    assert table.normalized[(1, 1, 1)] == pytest.approx(-1.0, abs=tol)
    for key, w in table.normalized.items():
        if key != (1, 1, 1):
            assert w == pytest.approx(1.0, abs=tol)
    assert (table.cohomology_class, table.class_index) == ("nontrivial", 1)


def test_anomaly_survives_fusion_rescaling(family, fusions, tol, rng):
    rescaled = {}
    for key, sol in fusions.items():
        c = np.exp(2j * np.pi * rng.random())
        rescaled[key] = replace(sol, Y=c * sol.Y, Y_rinv=sol.Y_rinv / c)
    table = associator(family, rescaled, tol)
    assert table.cohomology_class == "nontrivial"
    assert abs(table.omega[(1, 1, 1)]) == pytest.approx(1.0)
    assert table.normalized[(1, 1, 1)] == pytest.approx(-1.0, abs=1e-9)


def test_onsite_family_is_anomaly_free(tol):
    family = onsite_family(FiniteGroup.cyclic(2), [I2, X])
    table = associator(family, solve_family_fusions(family, None, tol), tol)
    assert table.cohomology_class == "trivial"


def test_bad_hint_is_rejected(family, tol):
    hints = czy.czy_fusion_hints()
    hints[(1, 1)] = np.eye(4)
    with pytest.raises(InconsistentFusionError):
        solve_family_fusions(family, hints, tol)


def test_no_fusion_into_larger_bond(tol):
    small = MpoTensor.identity(2)
    big = MpoTensor(np.ones((2, 2, 3, 3)))
    with pytest.raises(NoFusionError):
        solve_fusion(small, small, big, tol=tol)


def test_fusion_shape_mismatch(tol):
    with pytest.raises(ShapeError):
        solve_fusion(MpoTensor.identity(2), MpoTensor.identity(3), MpoTensor.identity(2), tol=tol)


@pytest.mark.parametrize(("n", "p"), [(2, 0), (2, 1), (3, 1), (3, 2), (4, 3)])
def test_cyclic_classes(n, p, tol):
    omega = cyclic_cocycle(n, p)
    label, index = cocycle_class(omega.values, omega.group, tol)
    assert index == p
    assert label == ("trivial" if p == 0 else "nontrivial")


def test_class_rejects_non_cocycle(tol):
    values = np.ones((2, 2, 2), dtype=complex)
    values[0, 1, 1] = -1
    with pytest.raises(NotACocycleError):
        cocycle_class(values, FiniteGroup.cyclic(2), tol)


def test_class_unknown_for_non_cyclic(tol):
    G = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    assert cocycle_class(np.ones((4, 4, 4)), G, tol) == ("unknown", -1)


def test_extraction_methods_agree_with_table(family, fusions, tol):
    by_fusion = extract_multiplication(family, fusions, method="fusion", tol=tol)
    by_ops = extract_multiplication(family, method="operators", tol=tol)
    assert_allclose(by_fusion, czy.czy_lambda(), atol=1e-10)
    assert_allclose(by_ops, czy.czy_lambda(), atol=1e-10)
    assert set(np.unique(np.round(by_ops.real * 2) / 2)) <= {-1.0, -0.5, 0.0, 0.5, 1.0}


def test_comultiplication_splits_boundary(family, tol):
    delta = extract_comultiplication(family, tol=tol, lengths=(1, 2, 3))
    # e_1^{mn} -> sum_p e_1^{mp} (x) e_1^{pn}: two terms for every sector-1 element
    assert (np.count_nonzero(delta[4:], axis=(1, 2)) == 2).all()


def test_family_prebialgebra_labels(family, fusions, tol):
    P = family_prebialgebra(family, fusions, tol=tol)
    assert P.labels[0] == "e_0^12"
    assert_allclose(P.delta, czy.czy_algebra().delta)


def test_family_needs_all_sectors():
    with pytest.raises(ShapeError):
        MpoFamily(FiniteGroup.cyclic(2), {0: MpoTensor.identity(2)}, {0: [(0, 0)]})


def _bare_chains(fusions, a, b, c, bonds):
    L = fusions[((a + b) % 2, c)].Y @ np.kron(fusions[(a, b)].Y, np.eye(bonds[c]))
    R = fusions[(a, (b + c) % 2)].Y @ np.kron(np.eye(bonds[a]), fusions[(b, c)].Y)
    return L, R


def test_injective_sector_chains_match_as_matrices(fusions):
    L, R = _bare_chains(fusions, 1, 1, 1, {0: 3, 1: 2})
    assert_allclose(L, -R, atol=1e-12)


def test_non_injective_chains_agree_on_support_only(family, fusions, tol):
    L, R = _bare_chains(fusions, 0, 0, 0, {0: 3, 1: 2})
    w = np.vdot(R, L) / np.vdot(R, R)
    assert np.linalg.norm(L - w * R) / np.linalg.norm(R) > 1e-3
    table = associator(family, fusions, tol)
    assert table.omega[(0, 0, 0)] == pytest.approx(1.0, abs=tol)
    assert max(table.residuals.values()) <= tol


def test_normalize_removes_non_phase_coboundaries(tol):
    G = FiniteGroup.cyclic(2)
    beta = np.array([[1.0, 2.0], [0.5, 3.0 - 1.0j]])
    values = cyclic_cocycle(2, 1).values * coboundary_values(beta, G)
    normalized = normalize_cocycle(values, G, tol)
    expected = np.ones((2, 2, 2))
    expected[1, 1, 1] = -1
    assert_allclose(normalized, expected, atol=1e-10)
    assert cocycle_class(values, G, tol) == ("nontrivial", 1)


@pytest.mark.parametrize(("n", "p"), [(3, 1), (4, 2)])
def test_normalized_cocycles_have_unit_modulus(n, p, tol, rng):
    G = FiniteGroup.cyclic(n)
    beta = rng.uniform(0.5, 2.0, size=(n, n)) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=(n, n)))
    values = cyclic_cocycle(n, p).values * coboundary_values(beta, G)
    normalized = normalize_cocycle(values, G, tol)
    assert_allclose(np.abs(normalized), 1.0, atol=1e-9)
    assert_allclose(normalized[0], 1.0, atol=1e-9)
    assert_allclose(normalized[:, 0], 1.0, atol=1e-9)
    assert_allclose(normalized[:, :, 0], 1.0, atol=1e-9)
    assert cocycle_class(normalized, G, tol) == (("trivial" if p == 0 else "nontrivial"), p)
