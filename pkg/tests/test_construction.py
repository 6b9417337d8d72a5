from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mposym.algebra.prebialgebra import PreBialgebra
from mposym.algebra.rep_theory import FusionRing, Representation
from mposym.config import POSITIVITY_TOL
from mposym.core.tensor import mpdo_contract
from mposym.errors import PairingError, PreconditionError, TheoremPreconditionError
from mposym.groups import FiniteGroup
from mposym.models import czy
from mposym.models.channels import czy_state
from mposym.models.group_cocycle import trivial_cocycle, z2_nontrivial
from mposym.pipelines import (
    czy_positivity,
    czy_reconstruction,
    czy_rfp,
    czy_rfp_psi,
    group_rfp,
    spectrum_residual,
)
from mposym.rfp.construction import (
    build_mpo_tensor,
    build_rfp_tensor,
    canonical_regular_element,
    character_element,
    check_fixed_point_hypotheses,
    check_positivity,
    compare_mpdos,
    fusion_ring_of,
)


@pytest.fixture(scope="module")
def rfp_outcome():
    return czy_rfp(sizes=(2, 3))


def test_rebuilt_tensors_match_czy(tol):
    result = czy_reconstruction(tol)
    assert result.residuals[0] < tol
    assert result.residuals[1] < tol
    assert result.table.cohomology_class == "nontrivial"


def test_pairing_mismatch(phis):
    lam = np.zeros((2, 2, 2))
    for g in range(2):
        for h in range(2):
            lam[g, h, (g + h) % 2] = 1
    small = PreBialgebra(lam=lam)
    psi = Representation(small, np.stack([np.eye(1), np.eye(1)]))
    with pytest.raises(PairingError):
        build_mpo_tensor(phis["phi_1"], psi)


def test_hypotheses_hold_for_all_ones_ring():
    ring = FusionRing(("phi_1", "phi_2"), np.ones((2, 2, 2), dtype=int))
    report = check_fixed_point_hypotheses(ring)
    assert report.passed
    assert report.duals == {"phi_1": "phi_1", "phi_2": "phi_1"}
    assert report.strongly_connected


def test_hypotheses_report_disconnected_ring():
    N = np.zeros((2, 2, 2), dtype=int)
    N[0, 0, 0] = N[1, 1, 1] = 1
    report = check_fixed_point_hypotheses(FusionRing(("a", "b"), N))
    assert not report.transitive
    assert "transitivity" in report.failing
    assert not report.strongly_connected


def test_construction_refuses_failed_hypotheses(czy_algebra, monkeypatch):
    import mposym.rfp.construction as construction

    N = np.zeros((2, 2, 2), dtype=int)
    N[0, 0, 0] = N[1, 1, 1] = 1
    monkeypatch.setattr(
        construction,
        "fusion_ring_of",
        lambda algebra, irreps, tol, seed: (irreps, FusionRing(("a", "b"), N)),
    )
    phis = czy.phi_representations()
    with pytest.raises(TheoremPreconditionError, match="transitivity"):
        build_rfp_tensor(czy_algebra, czy_rfp_psi(), [phis["phi_1"], phis["phi_2"]])


def test_fusion_ring_keeps_given_irreps(czy_algebra, phis, tol):
    irreps, ring = fusion_ring_of(czy_algebra, [phis["phi_1"], phis["phi_2"]], tol)
    assert [rep.name for rep in irreps] == ["phi_1", "phi_2"]
    assert (ring.N == 1).all()


def test_rfp_tensor_shape_and_weights(rfp_outcome):
    M = rfp_outcome.construction.tensor
    assert (M.d_out, M.d_in, M.bond) == (4, 4, 3)
    assert_allclose(rfp_outcome.construction.weights, [0.25, 0.25])


def test_rfp_density_matrices(rfp_outcome, tol):
    for n in (2, 3):
        assert rfp_outcome.hermiticity[n] < tol
        assert rfp_outcome.spectrum_residuals[n] < tol
        rho = mpdo_contract(rfp_outcome.construction.tensor, n).matrix
        assert rfp_outcome.traces[n] < tol
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert spectrum_residual(rho, czy_state(2 * n), normalized=False) < tol
        assert np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() > -POSITIVITY_TOL


def test_p0_and_s1_give_the_same_mpdo(rfp_outcome, tol):
    assert max(rfp_outcome.interchange.values()) < tol


def test_compare_mpdos_sees_different_weights(rfp_outcome):
    M = rfp_outcome.construction.tensor
    other = replace(M, data=2 * M.data)
    diffs = compare_mpdos(M, other, n_max=2)
    assert set(diffs) == {1, 2}
    assert diffs[1] > 0


def test_character_element_is_e3_e5_e8():
    x = character_element(czy_rfp_psi())
    expected = np.zeros(8)
    expected[[2, 4, 7]] = 1
    assert_allclose(x, expected, atol=1e-12)


def test_positivity_witness(tol):
    witness, result = czy_positivity(tol)
    assert witness < 1e-12
    assert result.witness is not None
    assert result.min_eigenvalue > -tol
    assert result.residual < np.sqrt(tol)


def test_positivity_needs_star(czy_algebra):
    with pytest.raises(PreconditionError):
        check_positivity(replace(czy_algebra, star=None), czy_rfp_psi(), czy.czy_operators())


def test_canonical_regular_element_weights(czy_algebra, phis, tol):
    irreps, ring = fusion_ring_of(czy_algebra, [phis["phi_1"], phis["phi_2"]], tol)
    functional, characters = canonical_regular_element(irreps, ring)
    assert characters.shape == (2, 8)
    assert_allclose(functional, 0.25 * characters.sum(axis=0))


def test_trivial_group_fixed_point(tol):
    fixed = group_rfp(trivial_cocycle(FiniteGroup.cyclic(1)), sizes=(2,), tol=tol)
    assert fixed.tensor.data.shape == (1, 1, 1, 1)
    assert_allclose(fixed.data.weight, np.eye(1))
    assert_allclose(fixed.tensor.data.reshape(-1), [1.0])
    assert fixed.data.biconnected is True


def test_z2_weak_hopf_fixed_point(tol):
    fixed = group_rfp(z2_nontrivial(), sizes=(2, 3), tol=tol)
    assert fixed.tensor.d_out == 4
    assert all(v > -POSITIVITY_TOL for v in fixed.min_eigenvalues.values())
    assert fixed.report.is_rfp
    assert fixed.data.biconnected == fixed.data.ring.is_transitive()
