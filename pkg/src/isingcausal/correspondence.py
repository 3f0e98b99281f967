"""Dictionary between four-site eigenstate observables and two-party game strategies.

Sites are 0-based; the default observable pair is

    Π⁰ = (I + Z_0 Z_2 X_3)/2,   Π¹ = (I + Z_1 Z_3)/2,

whose ground-state expectations equal the success probabilities of the
``b' = 0`` and ``b' = 1`` strategies on ``build_w_opt(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import game
from .errors import CorrespondenceError, ValidationError
from .kernel import (
    OperatorExpr,
    Spectrum,
    StateVector,
    eigensolve,
    expectation,
    reduced_density,
    to_dense,
)
from .lattice import build_game_hamiltonian

N_GAME = 4
EQ_ATOL = 1e-10
TIE_EPS = 1e-3
DEGENERACY_ATOL = 1e-9
FLAG_ATOL = 1e-9
CLASSICAL_BOUND = 0.75


# ---------------------------------------------------------------- states


def _bell(kind: str) -> np.ndarray:
    v = np.zeros(4)
    if kind == "phi":
        v[0] = v[3] = 1.0
    else:
        v[1] = v[2] = 1.0
    return (v / math.sqrt(2.0)).reshape(2, 2)


def _pair_product(p, kp, q, kq) -> np.ndarray:
    t = np.einsum("ab,cd->abcd", _bell(kp), _bell(kq))
    return np.transpose(t, np.argsort(list(p) + list(q))).reshape(-1)


def analytic_ground_state(theta) -> StateVector:
    """Closed-form four-site ground state built from Bell pairs.

    ``cos²(θ/2)|φ⁺⟩₀₂|φ⁺⟩₁₃ + (sinθ/2)(|φ⁺⟩₀₁|ψ⁺⟩₂₃ + |ψ⁺⟩₀₁|φ⁺⟩₂₃)
    - sin²(θ/2)|ψ⁺⟩₀₂|ψ⁺⟩₁₃``
    """
    t = float(theta)
    psi = (
        math.cos(t / 2) ** 2 * _pair_product((0, 2), "phi", (1, 3), "phi")
        + 0.5 * math.sin(t) * (
            _pair_product((0, 1), "phi", (2, 3), "psi")
            + _pair_product((0, 1), "psi", (2, 3), "phi")
        )
        - math.sin(t / 2) ** 2 * _pair_product((0, 2), "psi", (1, 3), "psi")
    )
    return StateVector.normalized(psi)


def game_spectrum(theta) -> Spectrum:
    return eigensolve(build_game_hamiltonian(theta))


def _edge_state(theta, top: bool) -> StateVector:
    sp = game_spectrum(theta)
    blocks = sp.degenerate_blocks(DEGENERACY_ATOL)
    lo, hi = blocks[-1] if top else blocks[0]
    if hi - lo == 1:
        return sp.state(lo)
    # degenerate: keep the component picked out by a small push in theta
    ref = game_spectrum(theta + TIE_EPS)
    k = len(ref) - 1 if top else 0
    sub = sp.eigenvectors[:, lo:hi]
    return StateVector.normalized(sub @ (sub.conj().T @ ref.eigenvectors[:, k]))


def ground_state(theta) -> StateVector:
    """Lowest eigenstate; a degenerate level is resolved toward ``theta + 1e-3``."""
    return _edge_state(theta, top=False)


def most_excited_state(theta) -> StateVector:
    """Highest eigenstate, resolved like :func:`ground_state`."""
    return _edge_state(theta, top=True)


# ---------------------------------------------------------------- observables


@dataclass(frozen=True)
class ObservablePair:
    """Three-body ``Π⁰`` and two-body ``Π¹`` on the four-site ring."""

    pi0: OperatorExpr
    pi1: OperatorExpr
    label: str = "134/24"
    check_projectors: bool = True

    def __post_init__(self):
        if self.check_projectors:
            for name in ("pi0", "pi1"):
                m = to_dense(getattr(self, name)).matrix
                if np.max(np.abs(m @ m - m)) > 1e-12:
                    raise ValidationError(f"{name} of pair {self.label!r} is not a projector")


def _half_plus(factors: str) -> OperatorExpr:
    return OperatorExpr.build(N_GAME, [(0.5, ()), (0.5, factors)])


PAIR_VARIANTS = {
    "134/24": ("ZIZX", "IZIZ"),
    "123/24": ("ZXZI", "IZIZ"),
    "234/24": ("IZXZ", "IZIZ"),
    "124/24": ("XZIZ", "IZIZ"),
    "134/13": ("ZIZX", "ZIZI"),
}


def observable_pair(variant: str = "134/24") -> ObservablePair:
    """Projector pair; the label names the 1-based sites of ``Π⁰`` and ``Π¹``."""
    try:
        p0, p1 = PAIR_VARIANTS[variant]
    except KeyError:
        raise ValidationError(f"unknown variant {variant!r}; choose from {sorted(PAIR_VARIANTS)}") from None
    return ObservablePair(_half_plus(p0), _half_plus(p1), variant)


DEFAULT_PAIR = observable_pair()


def k_avg(state: StateVector, pair: ObservablePair = DEFAULT_PAIR) -> float:
    """``(⟨Π⁰⟩ + ⟨Π¹⟩)/2``."""
    return 0.5 * (expectation(state, pair.pi0) + expectation(state, pair.pi1))


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class IdentityReport:
    theta: float
    pi0: float
    pi1: float
    p_alice: float
    p_bob: float
    expected_alice: float
    expected_bob: float
    variant: str

    @property
    def max_deviation(self) -> float:
        return max(
            abs(self.pi0 - self.p_alice),
            abs(self.pi1 - self.p_bob),
            abs(self.pi0 - self.expected_alice),
            abs(self.pi1 - self.expected_bob),
        )

    @property
    def ok(self) -> bool:
        return self.max_deviation <= EQ_ATOL


def verify_eq10(theta, variant: str = "134/24", raise_on_fail: bool = True) -> IdentityReport:
    """Spin-side projector expectations against game-side traces.

    The spin side uses the dense ground state; the game side uses
    ``build_w_opt``.  Both are compared with ``(1+sinθ)/2`` and
    ``(1+cosθ)/2``.
    """
    t = float(theta)
    pair = observable_pair(variant)
    psi = ground_state(t)
    w = game.build_w_opt(t)
    rep = IdentityReport(
        t,
        expectation(psi, pair.pi0),
        expectation(psi, pair.pi1),
        game.p_alice(w),
        game.p_bob(w),
        (1 + math.sin(t)) / 2,
        (1 + math.cos(t)) / 2,
        variant,
    )
    if raise_on_fail and not rep.ok:
        raise CorrespondenceError(f"observable/probability mismatch: {rep}")
    return rep


def rho134_closed_form(theta) -> np.ndarray:
    """Three-site reduced state on sites ``(0, 2, 3)`` in closed form."""
    c, s = math.cos(theta), math.sin(theta)
    cs = c * s
    expr = OperatorExpr.build(3, [
        (1, ()), (cs, "XII"), (cs, "IXI"), (cs, "IIX"),
        (c, "ZZI"), (-c, "YYI"), (1, "XXI"), (cs, "XXX"),
        (s, "ZZX"), (-s, "YYX"),
    ]) / 8
    return to_dense(expr).matrix


@dataclass(frozen=True)
class Rho134Report:
    theta: float
    max_deviation: float
    zz: float
    zzx: float

    @property
    def ok(self) -> bool:
        return (
            self.max_deviation <= EQ_ATOL
            and abs(self.zz - math.cos(self.theta)) <= EQ_ATOL
            and abs(self.zzx - math.sin(self.theta)) <= EQ_ATOL
        )


def verify_rho134(theta, state: StateVector | None = None) -> Rho134Report:
    """Reduced state of the ground state on sites ``(0, 2, 3)`` versus the closed form."""
    t = float(theta)
    psi = ground_state(t) if state is None else state
    rho = reduced_density(psi, (0, 2, 3)).matrix
    dev = float(np.max(np.abs(rho - rho134_closed_form(t))))
    zz_op = to_dense(OperatorExpr.build(3, [(1, "ZZI")])).matrix
    zzx_op = to_dense(OperatorExpr.build(3, [(1, "ZZX")])).matrix
    return Rho134Report(
        t, dev,
        float(np.trace(rho @ zz_op).real),
        float(np.trace(rho @ zzx_op).real),
    )


# ---------------------------------------------------------------- strategy catalogue


@dataclass(frozen=True)
class StrategyRow:
    """One correspondence row, evaluated on both sides at a single angle."""

    number: int
    theta: float
    spin_pi0: float
    spin_pi1: float
    p_alice: float
    p_bob: float
    expected_pi0: float
    expected_pi1: float
    state: str = "ground"

    @property
    def max_deviation(self) -> float:
        return max(
            abs(self.spin_pi0 - self.p_alice),
            abs(self.spin_pi1 - self.p_bob),
            abs(self.spin_pi0 - self.expected_pi0),
            abs(self.spin_pi1 - self.expected_pi1),
        )

    @property
    def ok(self) -> bool:
        return self.max_deviation <= EQ_ATOL

    @property
    def p_total(self) -> float:
        return 0.5 * (self.p_alice + self.p_bob)


@dataclass(frozen=True)
class _RowSpec:
    number: int
    pi0: Callable[[float], OperatorExpr]
    pi1: Callable[[float], OperatorExpr]
    w: Callable[[float], game.ProcessMatrix]
    alice_axes: Sequence[str]
    bob_axes: Sequence[str]
    expected: Callable[[float], tuple[float, float]]


def _const(expr):
    return lambda _t: expr


_HALF_I = OperatorExpr.identity(N_GAME, 0.5)

STRATEGY_ROWS: tuple[_RowSpec, ...] = (
    _RowSpec(
        1,
        _const(_half_plus("YIYX")),
        _const(_half_plus("YIYI")),
        lambda t: game.embed_process(4, {
            "IYYI": -math.cos(t),
            "YIXY": -math.sin(t),
        }),
        ("Y", "Y", "X", "Y"),
        ("Y", "Y", "Y"),
        lambda t: ((1 - math.sin(t)) / 2, (1 - math.cos(t)) / 2),
    ),
    _RowSpec(
        2,
        _const(_HALF_I),
        _const(_half_plus("XIXI")),
        lambda t: game.embed_process(4, {"IXXI": 1.0}),
        game.ALICE_AXES,
        ("Z", "X", "X"),
        lambda t: (0.5, 1.0),
    ),
    _RowSpec(
        3,
        _const(_half_plus("XIXX")),
        _const(_HALF_I),
        lambda t: game.embed_process(4, {"XIXX": math.sin(t) * math.cos(t)}),
        ("X", "X", "X", "X"),
        game.BOB_AXES,
        lambda t: ((1 + math.sin(t) * math.cos(t)) / 2, 0.5),
    ),
)


def table1_catalog(theta, state: StateVector | None = None) -> list[StrategyRow]:
    """Evaluate every correspondence row on the ground state at ``theta``.

    Rows 2 and 3 pair one side with ``I/2``, which is not a projector, so
    the spin side here uses plain expectation values.
    """
    t = float(theta)
    psi = ground_state(t) if state is None else state
    rows = []
    for spec in STRATEGY_ROWS:
        w = spec.w(t)
        e0, e1 = spec.expected(t)
        rows.append(StrategyRow(
            spec.number, t,
            expectation(psi, spec.pi0(t)),
            expectation(psi, spec.pi1(t)),
            game.p_alice(w, spec.alice_axes),
            game.p_bob(w, axes=spec.bob_axes),
            e0, e1,
        ))
    return rows


# ---------------------------------------------------------------- classification


def default_classification_grid(steps: int = 65) -> np.ndarray:
    """``steps`` angles spaced ``π/(steps//2 + 1)`` apart around ``π/4``.

    With 65 points this is ``π/4 + jπ/33`` for ``j = -16..48``: it covers a
    full period (so the mirror window ``(π, 3π/2)`` is sampled), contains
    ``π/4`` and ``5π/4``, and avoids the degenerate multiples of ``π/2``.
    """
    steps = int(steps)
    if steps < 2:
        raise ValidationError("need at least two grid points")
    denom = steps // 2 + 1
    j = np.arange(steps) - (steps // 4)
    return math.pi / 4 + j * math.pi / denom


@dataclass(frozen=True)
class ClassificationReport:
    """Per-eigenstate maximum of ``K_avg`` over a grid.

    ``sup_k_avg[k]`` is the maximum over the grid of the largest
    eigenvalue of ``(Π⁰+Π¹)/2`` compressed onto the degenerate level that
    contains eigenstate ``k`` (energy ordering).  ``basis_k_avg`` is the
    same maximum for the particular eigenvector returned by the solver.
    """

    thetas: np.ndarray = field(repr=False)
    sup_k_avg: np.ndarray
    argmax_theta: np.ndarray
    basis_k_avg: np.ndarray
    degenerate_levels: int
    threshold: float = CLASSICAL_BOUND

    @property
    def flagged(self) -> np.ndarray:
        return self.sup_k_avg > self.threshold + FLAG_ATOL

    @property
    def flagged_indices(self) -> list[int]:
        return [int(k) for k in np.flatnonzero(self.flagged)]

    @property
    def note(self) -> str:
        return (
            f"{self.degenerate_levels} degenerate levels met on the grid; "
            "their members share the subspace supremum"
        )


def classify_eigenstates(thetas=None, pair: ObservablePair = DEFAULT_PAIR) -> ClassificationReport:
    """Flag eigenstates whose ``K_avg`` can exceed the classical bound."""
    grid = default_classification_grid() if thetas is None else np.asarray(thetas, dtype=float)
    if grid.size == 0:
        raise ValidationError("empty angle grid")
    k_op = 0.5 * (to_dense(pair.pi0).matrix + to_dense(pair.pi1).matrix)
    dim = 1 << N_GAME
    best = np.full(dim, -np.inf)
    arg = np.zeros(dim)
    basis_best = np.full(dim, -np.inf)
    n_deg = 0
    for t in grid:
        sp = game_spectrum(t)
        v = sp.eigenvectors
        diag = np.einsum("ik,ij,jk->k", v.conj(), k_op, v).real
        basis_best = np.maximum(basis_best, diag)
        for lo, hi in sp.degenerate_blocks(DEGENERACY_ATOL):
            if hi - lo == 1:
                val = diag[lo]
            else:
                n_deg += 1
                sub = v[:, lo:hi]
                val = float(np.linalg.eigvalsh(sub.conj().T @ k_op @ sub)[-1])
            upd = val > best[lo:hi]
            best[lo:hi] = np.where(upd, val, best[lo:hi])
            arg[lo:hi] = np.where(upd, t, arg[lo:hi])
    return ClassificationReport(grid, best, arg, basis_best, n_deg)
