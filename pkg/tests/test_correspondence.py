import math

import numpy as np
import pytest

from conftest import game_hamiltonian_oracle
from isingcausal.correspondence import (
    PAIR_VARIANTS,
    ObservablePair,
    analytic_ground_state,
    classify_eigenstates,
    default_classification_grid,
    game_spectrum,
    ground_state,
    k_avg,
    most_excited_state,
    observable_pair,
    rho134_closed_form,
    table1_catalog,
    verify_eq10,
    verify_rho134,
)
from isingcausal.errors import ValidationError
from isingcausal.kernel import OperatorExpr, reduced_density

GRID64 = np.linspace(0, 2 * math.pi, 64, endpoint=False)
GRID16 = np.linspace(0, 2 * math.pi, 16, endpoint=False)


def oracle_ground(theta):
    w, v = np.linalg.eigh(game_hamiltonian_oracle(theta))
    return w, v


class TestStates:
    @pytest.mark.parametrize("theta", GRID16)
    def test_analytic_is_eigenvector(self, theta):
        psi = analytic_ground_state(theta).amplitudes
        h = game_hamiltonian_oracle(theta)
        w, _ = oracle_ground(theta)
        np.testing.assert_allclose(h @ psi, w[0] * psi, atol=1e-12)

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, 4.0])
    def test_ground_overlap(self, theta):
        assert abs(ground_state(theta).overlap(analytic_ground_state(theta))) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("theta", GRID16)
    def test_mirror_spectrum(self, theta):
        ev = game_spectrum(theta).eigenvalues
        np.testing.assert_allclose(ev, -ev[::-1], atol=1e-12)

    @pytest.mark.parametrize("theta", [0.2, 0.9, math.pi / 4, 2.1])
    def test_excited_is_shifted_ground(self, theta):
        a = most_excited_state(theta)
        b = ground_state(theta + math.pi)
        assert abs(a.overlap(b)) == pytest.approx(1, abs=1e-9)
        ra = reduced_density(a, (0, 2, 3)).matrix
        rb = reduced_density(b, (0, 2, 3)).matrix
        np.testing.assert_allclose(ra, rb, atol=1e-9)

    def test_degenerate_tie_break_is_eigenvector(self):
        psi = ground_state(0.0).amplitudes
        h = game_hamiltonian_oracle(0.0)
        np.testing.assert_allclose(h @ psi, -4 * psi, atol=1e-12)


class TestObservablePair:
    def test_variants_are_projectors(self):
        for v in PAIR_VARIANTS:
            assert observable_pair(v).label == v

    def test_unknown_variant(self):
        with pytest.raises(ValidationError):
            observable_pair("999/1")

    def test_non_projector_rejected(self):
        half = OperatorExpr.identity(4, 0.5)
        with pytest.raises(ValidationError):
            ObservablePair(half, half, "half")

    def test_k_avg_quarter(self):
        assert k_avg(ground_state(math.pi / 4)) == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)


class TestProjectorIdentity:
    @pytest.mark.parametrize("theta", GRID64)
    def test_grid(self, theta):
        rep = verify_eq10(theta)
        assert rep.ok and rep.max_deviation <= 1e-10

    @pytest.mark.parametrize("variant", sorted(PAIR_VARIANTS))
    @pytest.mark.parametrize("theta", [0.4, 1.2, 3.3, 5.0])
    def test_variants(self, variant, theta):
        assert verify_eq10(theta, variant).ok

    def test_report_no_raise(self):
        rep = verify_eq10(0.7, raise_on_fail=False)
        assert rep.expected_alice == pytest.approx((1 + math.sin(0.7)) / 2)


class TestRho134:
    @pytest.mark.parametrize("theta", GRID16)
    def test_closed_form_analytic_state(self, theta):
        rep = verify_rho134(theta, analytic_ground_state(theta))
        assert rep.ok
        assert rep.zz == pytest.approx(math.cos(theta), abs=1e-10)
        assert rep.zzx == pytest.approx(math.sin(theta), abs=1e-10)

    @pytest.mark.parametrize("theta", [t for t in GRID16 if abs(math.sin(t)) > 1e-9])
    def test_closed_form_solver_state(self, theta):
        assert verify_rho134(theta).ok

    @pytest.mark.parametrize("theta", [0.0, math.pi])
    def test_tie_break_residual_is_small(self, theta):
        # the 1e-3 push leaves an O(eps^3) admixture of the other ground state
        rep = verify_rho134(theta)
        assert rep.max_deviation < 1e-7
        assert rep.zz == pytest.approx(math.cos(theta), abs=1e-10)

    def test_against_oracle_state(self):
        theta = 0.8
        _, v = oracle_ground(theta)
        psi = v[:, 0].reshape([2] * 4)
        rho = np.einsum("abcd,ebfg->acdefg", psi, psi.conj()).reshape(8, 8)
        np.testing.assert_allclose(rho, rho134_closed_form(theta), atol=1e-12)

    def test_closed_form_is_state(self):
        for t in GRID16:
            r = rho134_closed_form(t)
            assert np.trace(r) == pytest.approx(1)
            assert np.linalg.eigvalsh(r)[0] >= -1e-12

    def test_detects_wrong_state(self):
        rep = verify_rho134(0.5, most_excited_state(0.5))
        assert not rep.ok


class TestTable1:
    @pytest.mark.parametrize("theta", GRID16)
    def test_rows(self, theta):
        rows = table1_catalog(theta)
        assert [r.number for r in rows] == [1, 2, 3]
        for r in rows:
            assert r.ok, r

    def test_row_values(self):
        t = 0.6
        r1, r2, r3 = table1_catalog(t)
        assert r1.spin_pi0 == pytest.approx((1 - math.sin(t)) / 2)
        assert (r2.p_alice, r2.p_bob) == pytest.approx((0.5, 1.0))
        assert r3.spin_pi0 == pytest.approx((1 + math.sin(t) * math.cos(t)) / 2)
        assert r2.p_total == pytest.approx(0.75)


class TestClassification:
    def test_grid(self):
        g = default_classification_grid()
        assert g.size == 65
        assert np.any(np.isclose(g, math.pi / 4)) and np.any(np.isclose(g, 5 * math.pi / 4))
        assert not np.any(np.isclose(np.mod(g, math.pi / 2), 0, atol=1e-9))

    def test_grid_size_validated(self):
        with pytest.raises(ValidationError):
            default_classification_grid(1)

    def test_report_structure(self):
        rep = classify_eigenstates(default_classification_grid(17))
        assert rep.sup_k_avg.shape == (16,) and rep.basis_k_avg.shape == (16,)
        assert np.all(rep.sup_k_avg >= rep.basis_k_avg - 1e-12)
        assert rep.flagged.dtype == bool
        assert "degenerate" in rep.note

    def test_ground_state_flagged(self):
        rep = classify_eigenstates([math.pi / 4])
        assert rep.basis_k_avg[0] == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)
        assert 0 in rep.flagged_indices

    def test_empty(self):
        with pytest.raises(ValidationError):
            classify_eigenstates([])

    def test_k_avg_peak_ground(self):
        grid = np.linspace(0, math.pi / 2, 33)
        vals = [k_avg(ground_state(t)) for t in grid]
        assert grid[int(np.argmax(vals))] == pytest.approx(math.pi / 4)
