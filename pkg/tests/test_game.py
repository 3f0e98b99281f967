import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_op
from isingcausal import game
from isingcausal.errors import CapacityError, ValidationError
from isingcausal.game import (
    GameOutcome,
    LocalMeasurement,
    PartyRegister,
    build_w_general,
    build_w_opt,
    build_w_three,
    classical_bound,
    local_measurement,
    multi_party_game,
    guess_rows,
    outcome_probability,
    two_party_game,
    validate_process,
)
from isingcausal.kernel import OperatorExpr

GRID64 = np.linspace(0, 2 * math.pi, 64, endpoint=False)
GRID32 = np.linspace(0, 2 * math.pi, 32, endpoint=False)


def w_opt_oracle(theta):
    c, s = math.cos(theta), math.sin(theta)
    return (np.eye(16) + c * kron_op(4, {1: "Z", 2: "Z"}) + s * kron_op(4, {0: "Z", 2: "X", 3: "Z"})) / 4


def classical_orders(n):
    """Best (left, right) over linear orders; a party learns any earlier party's bit."""
    best = None
    for order in itertools.permutations(range(n)):
        rank = {p: k for k, p in enumerate(order)}
        left = sum(Fraction(1) if rank[(i - 1) % n] < rank[i] else Fraction(1, 2) for i in range(n)) / n
        right = sum(Fraction(1) if rank[(i + 1) % n] < rank[i] else Fraction(1, 2) for i in range(n)) / n
        key = (left + right, left)
        if best is None or key > best[0]:
            best = (key, (left, right))
    return best[1]


def random_rho(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestRegister:
    def test_standard(self):
        reg = PartyRegister.standard(3)
        assert reg.names == ("A", "B", "C") and reg.input_qubit(4) == 2

    @pytest.mark.parametrize("parties", [(("A", 0, 0),), (("A", 0, 1), ("A", 2, 3)), (("A", 0, 2),)])
    def test_invalid(self, parties):
        with pytest.raises(ValidationError):
            PartyRegister(parties)


class TestBuilders:
    @pytest.mark.parametrize("theta", [0.0, 0.5, math.pi / 4, 3.0])
    def test_w_opt_oracle(self, theta):
        w = build_w_opt(theta)
        np.testing.assert_allclose(w.dense().matrix, w_opt_oracle(theta), atol=1e-15)
        assert w.trace == pytest.approx(4)

    def test_w_opt_spectrum_at_zero(self):
        ev = np.linalg.eigvalsh(build_w_opt(0.0).dense().matrix)
        np.testing.assert_allclose(ev, [0] * 8 + [0.5] * 8, atol=1e-14)

    def test_w_three_terms(self):
        f0, f1 = 0.3, -0.6
        w = build_w_three(f0, f1)
        ref = OperatorExpr.build(6, [
            (1, ()),
            (f0 / 3, {1: "Z", 2: "Z"}), (f0 / 3, {3: "Z", 4: "Z"}), (f0 / 3, {0: "Z", 5: "Z"}),
            (f1 / 3, {0: "X", 2: "X", 3: "Z"}), (f1 / 3, {2: "X", 4: "X", 5: "Z"}), (f1 / 3, {0: "X", 1: "Z", 4: "X"}),
        ]) / 8
        assert w.body.allclose(ref, atol=1e-15)
        assert w.trace == pytest.approx(8)

    def test_w_three_maximally_mixed(self):
        np.testing.assert_allclose(build_w_three(0, 0).dense().matrix, np.eye(64) / 8)

    def test_w_three_z_channels_psd(self):
        assert validate_process(build_w_three(1, 0)).min_eigenvalue >= -1e-12

    @pytest.mark.parametrize("f", [1.5, -1.01, math.nan])
    def test_f_range(self, f):
        with pytest.raises(ValidationError):
            build_w_three(f, 0)

    def test_general_reduces_to_two_party(self):
        for theta in (0.2, 1.3):
            w = build_w_general(2, math.cos(theta), math.sin(theta), ("Z", "Z", "Z", "X", "Z"), n0=1, n1=1)
            assert w.body.allclose(build_w_opt(theta).body, atol=1e-15)

    def test_general_default_two_party_averages(self):
        w = build_w_general(2, 1.0, 0.0)
        assert w.body.coefficient({1: "Z", 2: "Z"}) == pytest.approx(1 / 8)
        assert w.body.coefficient({3: "Z", 0: "Z"}) == pytest.approx(1 / 8)

    def test_general_large_register_is_symbolic(self):
        w = build_w_general(50, 0.5, 0.5)
        assert len(w.body) == 101 and w.trace == pytest.approx(2**50)
        with pytest.raises(CapacityError):
            w.dense()


class TestMeasurements:
    def test_zero_zero(self):
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        np.testing.assert_allclose(local_measurement(0, 0, "Z", "A").matrix, expected)

    def test_minus(self):
        m = LocalMeasurement("A", alpha=1, input_axis="X").input_operator
        np.testing.assert_allclose(m, np.array([[1, -1], [-1, 1]]) / 2)

    @pytest.mark.parametrize("axis", ["X", "Y", "Z"])
    def test_completeness(self, axis):
        total = sum(local_measurement(a, b, axis, "A").matrix for a in (0, 1) for b in (0, 1))
        np.testing.assert_allclose(total, np.eye(4))

    def test_bad_state(self):
        with pytest.raises(ValidationError):
            LocalMeasurement("A", output_state=np.eye(2))

    def test_bad_bit(self):
        with pytest.raises(ValidationError):
            LocalMeasurement("A", alpha=2)


class TestOutcomeProbability:
    def test_overlap_rejected(self):
        w = build_w_opt(0.3)
        with pytest.raises(ValidationError):
            outcome_probability(w, [LocalMeasurement("A"), LocalMeasurement("A")])

    def test_missing_party(self):
        with pytest.raises(ValidationError):
            outcome_probability(build_w_opt(0.3), [LocalMeasurement("A")])

    def test_maximally_mixed_uniform(self):
        w = build_w_general(2, 0, 0)
        p = [outcome_probability(w, [LocalMeasurement("A", x, 0), LocalMeasurement("B", y, 0)])
             for x in (0, 1) for y in (0, 1)]
        np.testing.assert_allclose(p, 0.25)

    @pytest.mark.parametrize("theta", [0.1, 2.2])
    def test_routes_agree(self, theta):
        w = build_w_three(math.cos(theta), math.sin(theta))
        for bits in itertools.product((0, 1), repeat=3):
            ms = [LocalMeasurement(n, b, 1 - b, ax) for n, b, ax in zip("ABC", bits, "ZXY")]
            assert outcome_probability(w, ms, "dense") == pytest.approx(outcome_probability(w, ms, "factorized"), abs=1e-14)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 2 * math.pi), st.tuples(*[st.sampled_from("XYZ")] * 4))
    def test_completeness_of_probabilities(self, theta, axes):
        w = build_w_opt(theta)
        total = sum(
            outcome_probability(w, [LocalMeasurement("A", x, a, axes[0], axes[1]), LocalMeasurement("B", y, b, axes[2], axes[3])])
            for x, a, y, b in itertools.product((0, 1), repeat=4)
        )
        # each party sums to I on its input and to 2 I on its output over the two preparations
        assert total == pytest.approx(4.0, abs=1e-10)


class TestTwoParty:
    @pytest.mark.parametrize("theta", GRID64)
    def test_closed_forms(self, theta):
        o = two_party_game(theta)
        assert o.p_alice == pytest.approx((1 + math.sin(theta)) / 2, abs=1e-12)
        assert o.p_bob == pytest.approx((1 + math.cos(theta)) / 2, abs=1e-12)

    def test_quarter(self):
        assert two_party_game(math.pi / 4).p_total == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)

    def test_zero(self):
        o = two_party_game(0.0)
        assert (o.p_alice, o.p_bob, o.p_total) == pytest.approx((0.5, 1.0, 0.75))

    def test_pi(self):
        assert two_party_game(math.pi).p_total == pytest.approx(0.25)

    def test_rho_independence(self, rng):
        w = build_w_opt(0.7)
        ref = game.p_bob(w)
        for _ in range(20):
            assert game.p_bob(w, random_rho(rng)) == pytest.approx(ref, abs=1e-12)

    def test_bound_geometry_and_symmetry(self):
        grid = np.linspace(0, math.pi / 2, 33)
        p = np.array([two_party_game(t).p_total for t in grid])
        assert np.all(p[1:-1] > 0.75)
        assert abs(p[0] - 0.75) < 1e-12 and abs(p[-1] - 0.75) < 1e-12
        np.testing.assert_allclose(p, p[::-1], atol=1e-12)

    def test_outcome_invariant(self):
        with pytest.raises(ValidationError):
            GameOutcome(0.5, 0.5, 0.9)


class TestMultiParty:
    def test_three_party_ising(self):
        o = multi_party_game(3, 1.0, 0.0)
        assert (o.p_left, o.p_right, o.p_total) == pytest.approx((1.0, 0.5, 0.75))

    @pytest.mark.parametrize("f0,f1", [(0.3, 0.8), (-0.5, 0.1), (0.7, 0.7)])
    def test_rows(self, f0, f1):
        rows = guess_rows(build_w_three(f0, f1))
        assert len(rows) == 6
        for r in rows:
            expected = (1 + f0) / 2 if r.b_prime == 0 else (1 + f1) / 2
            assert r.probability == pytest.approx(expected, abs=1e-12)

    def test_alice_guesses_charlie(self):
        row = guess_rows(build_w_three(0.4, 0.2))[0]
        assert row.label == "P_A(guess=c, b'=0)"
        assert row.probability == pytest.approx(0.7)

    @pytest.mark.parametrize("n", [3, 4])
    def test_marginal_convention(self, n):
        f0, f1 = 0.6, -0.3
        rows = guess_rows(build_w_general(n, f0, f1), convention="marginal")
        for r in rows:
            expected = (1 + (f0 if r.b_prime == 0 else f1) / n) / 2
            assert r.probability == pytest.approx(expected, abs=1e-12)

    def test_symmetric_point(self):
        f = math.sin(math.pi / 4)
        assert multi_party_game(3, f, f).p_total == pytest.approx((2 + 2 * f) / 4)

    def test_many_parties_factorized(self):
        o = multi_party_game(50, 0.3, 0.6, route="factorized")
        assert (o.p_left, o.p_right) == pytest.approx((0.65, 0.8), abs=1e-12)

    def test_unknown_convention(self):
        with pytest.raises(ValidationError):
            guess_rows(build_w_three(0, 0), convention="mystery")


class TestClassicalBound:
    @pytest.mark.parametrize("n,expected", [
        (2, (Fraction(3, 4), Fraction(3, 4), Fraction(3, 4))),
        (3, (Fraction(5, 6), Fraction(2, 3), Fraction(3, 4))),
        (10, (Fraction(19, 20), Fraction(11, 20), Fraction(3, 4))),
    ])
    def test_values(self, n, expected):
        assert classical_bound(n) == expected

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_brute_force_orders(self, n):
        left, right = classical_orders(n)
        assert (left, right, (left + right) / 2) == classical_bound(n)

    def test_rejects_single_party(self):
        with pytest.raises(ValidationError):
            classical_bound(1)


class TestValidity:
    @pytest.mark.parametrize("theta", GRID32)
    def test_w_opt_valid(self, theta):
        rep = validate_process(build_w_opt(theta))
        assert rep.valid and rep.min_eigenvalue >= -1e-10

    def test_corrupted(self):
        w = build_w_opt(0.3)
        bad = game.ProcessMatrix(w.body + OperatorExpr.build(4, [(0.5 - 0.25 * math.cos(0.3), {1: "Z", 2: "Z"})]), w.register)
        rep = validate_process(bad)
        assert rep.min_eigenvalue < -1e-3 and not rep.valid

    def test_maximally_mixed(self):
        rep = validate_process(build_w_general(3, 0, 0))
        assert rep.min_eigenvalue == pytest.approx(1 / 8) and rep.trace == pytest.approx(8)

    @pytest.mark.parametrize("theta", GRID32[::4])
    def test_w_three_valid_on_circle(self, theta):
        assert validate_process(build_w_three(math.cos(theta), math.sin(theta))).min_eigenvalue >= -1e-10
