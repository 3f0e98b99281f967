"""Process matrices, local strategies and success probabilities of the causal game.

Party ``i`` owns an input qubit ``2i`` and an output qubit ``2i + 1``.
Two-party names follow ``A1, A2, B1, B2`` = qubits ``0, 1, 2, 3``.
A strategy assigns each party a rank-one projector on its input
(outcome ``alpha`` along ``input_axis``) and either a rank-one projector on
its output (bit ``beta`` along ``output_axis``) or a free unit-trace state.
Probabilities are ``Tr[(⊗ P_i) W]``.
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .kernel import (
    AXES,
    DenseOperator,
    OperatorExpr,
    PauliTerm,
    _check_capacity,
    dense_cap,
    kron_all,
    pauli_matrix,
    to_dense,
)

PROB_SLACK = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10


@dataclass(frozen=True)
class PartyRegister:
    """Ordered parties, each ``(name, input_qubit, output_qubit)``."""

    parties: tuple[tuple[str, int, int], ...]

    def __post_init__(self):
        parties = tuple((str(n), int(i), int(o)) for n, i, o in self.parties)
        if not parties:
            raise ValidationError("a register needs at least one party")
        names = [p[0] for p in parties]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate party names {names}")
        qubits = sorted(q for _, i, o in parties for q in (i, o))
        if qubits != list(range(2 * len(parties))):
            raise ValidationError(
                f"qubits {qubits} must cover 0..{2 * len(parties) - 1} exactly once"
            )
        object.__setattr__(self, "parties", parties)

    @classmethod
    def standard(cls, n_parties: int) -> "PartyRegister":
        """Parties ``A, B, C, ...`` with input ``2i`` and output ``2i+1``."""
        n = int(n_parties)
        if n < 1:
            raise ValidationError("need at least one party")
        if n <= 26:
            names = string.ascii_uppercase[:n]
        else:
            names = [f"P{i}" for i in range(n)]
        return cls(tuple((names[i], 2 * i, 2 * i + 1) for i in range(n)))

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    @property
    def n_qubits(self) -> int:
        return 2 * len(self.parties)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p[0] for p in self.parties)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown party {name!r}") from None

    def input_qubit(self, i: int) -> int:
        return self.parties[i % self.n_parties][1]

    def output_qubit(self, i: int) -> int:
        return self.parties[i % self.n_parties][2]


@dataclass(frozen=True)
class ProcessMatrix:
    """Process matrix ``W`` as a Pauli expansion on a party register."""

    body: OperatorExpr
    register: PartyRegister
    label: str = ""

    def __post_init__(self):
        if self.body.register_size != self.register.n_qubits:
            raise ValidationError(
                f"body acts on {self.body.register_size} qubits, register has {self.register.n_qubits}"
            )

    @property
    def n_parties(self) -> int:
        return self.register.n_parties

    @property
    def trace(self) -> float:
        return self.body.identity_coefficient * 2.0 ** self.register.n_qubits

    def dense(self) -> DenseOperator:
        return to_dense(self.body)


@dataclass(frozen=True)
class LocalMeasurement:
    """One party's instrument element.

    ``alpha`` is the observed input outcome along ``input_axis``.  ``beta``
    is the prepared output bit along ``output_axis``; when ``output_state``
    is given (a 2x2 unit-trace PSD matrix) it replaces the output projector.
    """

    party: str
    alpha: int = 0
    beta: int = 0
    input_axis: str = "Z"
    output_axis: str = "Z"
    output_state: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("alpha", "beta"):
            if getattr(self, name) not in (0, 1):
                raise ValidationError(f"{name} must be 0 or 1, got {getattr(self, name)!r}")
        for name in ("input_axis", "output_axis"):
            axis = str(getattr(self, name)).upper()
            if axis not in AXES:
                raise ValidationError(f"{name} must be one of {AXES}, got {axis!r}")
            object.__setattr__(self, name, axis)
        if self.output_state is not None:
            rho = np.array(self.output_state, dtype=complex)
            if rho.shape != (2, 2):
                raise ValidationError("output_state must be 2x2")
            if abs(np.trace(rho) - 1.0) > 1e-12 or np.max(np.abs(rho - rho.conj().T)) > 1e-12:
                raise ValidationError("output_state must be Hermitian with unit trace")
            if np.min(np.linalg.eigvalsh(rho)) < -1e-12:
                raise ValidationError("output_state must be positive semidefinite")
            rho.setflags(write=False)
            object.__setattr__(self, "output_state", rho)

    @property
    def input_operator(self) -> np.ndarray:
        return _projector(self.input_axis, self.alpha)

    @property
    def output_operator(self) -> np.ndarray:
        if self.output_state is not None:
            return np.array(self.output_state)
        return _projector(self.output_axis, self.beta)

    def operator(self) -> DenseOperator:
        """4x4 operator on (input, output) in that tensor order."""
        return DenseOperator(2, np.kron(self.input_operator, self.output_operator))


def _projector(axis: str, bit: int) -> np.ndarray:
    return 0.5 * (np.eye(2) + (-1) ** bit * pauli_matrix(axis))


MAXIMALLY_MIXED = np.eye(2) / 2


def local_measurement(alpha, beta, zeta, party, output_state=None) -> DenseOperator:
    """``½(I + (-1)^α σ_ζ) ⊗ ½(I + (-1)^β Z)`` (or ``⊗ ρ`` for a free output)."""
    return LocalMeasurement(party, alpha, beta, zeta, "Z", output_state).operator()


@dataclass(frozen=True)
class GameOutcome:
    """Left (``b' = 0``) and right (``b' = 1``) success probabilities."""

    p_left: float
    p_right: float
    p_total: float = float("nan")

    def __post_init__(self):
        if math.isnan(self.p_total):
            object.__setattr__(self, "p_total", 0.5 * (self.p_left + self.p_right))
        if abs(self.p_total - 0.5 * (self.p_left + self.p_right)) > 1e-12:
            raise ValidationError("p_total must be the mean of p_left and p_right")

    @property
    def p_alice(self) -> float:
        return self.p_left

    @property
    def p_bob(self) -> float:
        return self.p_right

    def violates(self, bound: float = 0.75, atol: float = 1e-12) -> bool:
        return self.p_total > bound + atol


# ---------------------------------------------------------------- builders


def _register_for(n_parties: int) -> PartyRegister:
    return PartyRegister.standard(n_parties)


def build_w_opt(theta) -> ProcessMatrix:
    """``¼[I + cosθ Z^{A2}Z^{B1} + sinθ Z^{A1}X^{B1}Z^{B2}]``."""
    theta = float(theta)
    c, s = math.cos(theta), math.sin(theta)
    body = OperatorExpr.build(4, [
        (0.25, ()),
        (0.25 * c, {1: "Z", 2: "Z"}),
        (0.25 * s, {0: "Z", 2: "X", 3: "Z"}),
    ])
    reg = PartyRegister((("A", 0, 1), ("B", 2, 3)))
    return ProcessMatrix(body, reg, f"w_opt(theta={theta:g})")


def _check_f(*fs):
    for f in fs:
        f = float(f)
        if not math.isfinite(f) or abs(f) > 1.0 + 1e-12:
            raise ValidationError(f"f values must lie in [-1, 1], got {f}")


def build_w_general(
    n_parties: int,
    f0: float,
    f1: float,
    axes: Sequence[str] = ("Z", "Z", "X", "X", "Z"),
    n0: int | None = None,
    n1: int | None = None,
) -> ProcessMatrix:
    """Cyclic multi-party process matrix.

    ``W = 2^{-𝒩}[I + (f0/n0) Σ_{i<n0} σ_α^{O_i} σ_β^{I_{i+1}}
    + (f1/n1) Σ_{i<n1} σ_γ^{I_i} σ_δ^{I_{i+1}} σ_η^{O_{i+1}}]``

    with ``axes = (α, β, γ, δ, η)`` and party indices mod 𝒩.  ``n0`` and
    ``n1`` default to 𝒩; passing ``n0 = n1 = 1`` at 𝒩 = 2 keeps a single
    term of each kind.

    The body is symbolic, so this works for any 𝒩; only dense use is capped.
    """
    n = int(n_parties)
    if n < 2:
        raise ValidationError("need at least two parties")
    _check_f(f0, f1)
    n0 = n if n0 is None else int(n0)
    n1 = n if n1 is None else int(n1)
    if not (1 <= n0 <= n and 1 <= n1 <= n):
        raise ValidationError(f"n0, n1 must lie in 1..{n}")
    if len(axes) != 5:
        raise ValidationError("axes must list (alpha, beta, gamma, delta, eta)")
    al, be, ga, de, et = (str(a).upper() for a in axes)
    reg = _register_for(n)
    norm = 2.0 ** -n
    terms = [PauliTerm(norm, ())]
    if f0:
        for i in range(n0):
            terms.append(PauliTerm(
                norm * f0 / n0, ((reg.output_qubit(i), al), (reg.input_qubit(i + 1), be))
            ))
    if f1:
        for i in range(n1):
            terms.append(PauliTerm(norm * f1 / n1, (
                (reg.input_qubit(i), ga),
                (reg.input_qubit(i + 1), de),
                (reg.output_qubit(i + 1), et),
            )))
    body = OperatorExpr(reg.n_qubits, terms)
    return ProcessMatrix(body, reg, f"w_general(n={n}, f0={f0:g}, f1={f1:g})")


def build_w_three(f0: float, f1: float) -> ProcessMatrix:
    """Three-party process matrix with Z channels and XXZ memory terms."""
    return build_w_general(3, f0, f1)


def embed_process(register_size: int, sub_body: Mapping, prefactor: float | None = None) -> ProcessMatrix:
    """Lift a body given on a few qubits onto a full two-party register.

    ``sub_body`` is ``{factors: coefficient}`` without the identity; the
    identity weight is chosen so that the trace equals ``2^𝒩``.
    """
    n_q = int(register_size)
    n_parties = n_q // 2
    pref = 2.0 ** -n_parties if prefactor is None else float(prefactor)
    spec = [(pref, ())] + [(pref * c, f) for f, c in sub_body.items()]
    return ProcessMatrix(OperatorExpr.build(n_q, spec), _register_for(n_parties))


# ---------------------------------------------------------------- traces


def _measurement_map(w: ProcessMatrix, measurements) -> list[LocalMeasurement]:
    if isinstance(measurements, Mapping):
        measurements = list(measurements.values())
    reg = w.register
    by_party: dict[int, LocalMeasurement] = {}
    for m in measurements:
        i = reg.index(m.party)
        if i in by_party:
            raise ValidationError(f"party {m.party!r} measured twice (overlapping supports)")
        by_party[i] = m
    if len(by_party) != reg.n_parties:
        missing = [n for k, n in enumerate(reg.names) if k not in by_party]
        raise ValidationError(f"no measurement for parties {missing}")
    return [by_party[i] for i in range(reg.n_parties)]


def _qubit_operators(w: ProcessMatrix, ms: list[LocalMeasurement]) -> list[np.ndarray]:
    ops: list[np.ndarray | None] = [None] * w.register.n_qubits
    for (name, qi, qo), m in zip(w.register.parties, ms):
        ops[qi] = m.input_operator
        ops[qo] = m.output_operator
    return ops


def _trace_factorized(w: ProcessMatrix, ops: list[np.ndarray]) -> complex:
    # Tr[(⊗_q O_q) Σ_t c_t ⊗_q σ_{t,q}] = Σ_t c_t Π_q tr(O_q σ_{t,q})
    local = {
        (q, a): complex(np.trace(ops[q] @ pauli_matrix(a)))
        for q in range(len(ops)) for a in ("I",) + AXES
    }
    total = 0j
    for term in w.body:
        sites = dict(term.factors)
        val = term.coefficient
        for q in range(len(ops)):
            val = val * local[(q, sites.get(q, "I"))]
        total += val
    return total


def _trace_dense(w: ProcessMatrix, ops: list[np.ndarray]) -> complex:
    big = kron_all(ops)
    return complex(np.sum(big.T * w.dense().matrix))


def outcome_probability(w: ProcessMatrix, measurements, route: str = "auto") -> float:
    """``Tr[(⊗_parties P) W]`` for one joint outcome.

    ``route="dense"`` forms both operators as dense matrices;
    ``"factorized"`` uses the Pauli expansion of ``W`` and single-qubit
    traces and has no size limit; ``"auto"`` picks dense when the register
    fits under the dense cap.
    """
    ms = _measurement_map(w, measurements)
    ops = _qubit_operators(w, ms)
    if route == "auto":
        route = "dense" if w.register.n_qubits <= dense_cap() else "factorized"
    if route == "dense":
        _check_capacity(w.register.n_qubits)
        value = _trace_dense(w, ops)
    elif route == "factorized":
        value = _trace_factorized(w, ops)
    else:
        raise ValidationError(f"unknown route {route!r}")
    if abs(value.imag) > PROB_SLACK:
        raise NumericalError(f"probability has imaginary part {value.imag:.3e}")
    p = value.real
    if not -PROB_SLACK <= p <= 1.0 + PROB_SLACK:
        raise NumericalError(f"probability {p!r} outside [0, 1]")
    return min(1.0, max(0.0, p))


# ---------------------------------------------------------------- two parties


ALICE_AXES = ("Z", "Z", "X", "Z")
BOB_AXES = ("Z", "Z", "Z")


def alice_strategy(a: int, b: int, x: int, y: int, axes=ALICE_AXES) -> list[LocalMeasurement]:
    """``b' = 0``: Bob reads Alice's channel and re-encodes ``y ⊕ b``.

    ``axes`` are the measurement axes of ``(A1, A2, B1, B2)``.
    """
    a1, a2, b1, b2 = axes
    return [
        LocalMeasurement("A", alpha=x, beta=a, input_axis=a1, output_axis=a2),
        LocalMeasurement("B", alpha=y, beta=y ^ b, input_axis=b1, output_axis=b2),
    ]


def bob_strategy(a: int, x: int, y: int, rho_b2=None, axes=BOB_AXES) -> list[LocalMeasurement]:
    """``b' = 1``: Alice sends ``a``, Bob reads it and outputs ``rho_b2``.

    ``axes`` are the measurement axes of ``(A1, A2, B1)``.
    """
    a1, a2, b1 = axes
    rho = MAXIMALLY_MIXED if rho_b2 is None else rho_b2
    return [
        LocalMeasurement("A", alpha=x, beta=a, input_axis=a1, output_axis=a2),
        LocalMeasurement("B", alpha=y, input_axis=b1, output_state=rho),
    ]


def p_alice(w: ProcessMatrix, axes=ALICE_AXES, route: str = "auto") -> float:
    """Probability that Alice's guess ``x`` equals Bob's bit ``b`` (``b' = 0``).

    Averaged over both random bits and summed over Bob's outcome ``y``.
    """
    total = 0.0
    for a, b in itertools.product((0, 1), repeat=2):
        total += sum(
            outcome_probability(w, alice_strategy(a, b, b, y, axes), route) for y in (0, 1)
        )
    return total / 4.0


def p_bob(w: ProcessMatrix, rho_b2=None, axes=BOB_AXES, route: str = "auto") -> float:
    """Probability that Bob's guess ``y`` equals Alice's bit ``a`` (``b' = 1``)."""
    total = 0.0
    for a in (0, 1):
        total += sum(
            outcome_probability(w, bob_strategy(a, x, a, rho_b2, axes), route) for x in (0, 1)
        )
    return total / 2.0


def two_party_game(theta, rho_b2=None) -> GameOutcome:
    """Success probabilities on ``build_w_opt(theta)`` computed by traces."""
    w = build_w_opt(theta)
    return GameOutcome(p_alice(w), p_bob(w, rho_b2))


# ---------------------------------------------------------------- many parties


@dataclass(frozen=True)
class GuessRow:
    """One row of the multi-party strategy list."""

    label: str
    guesser: str
    target: str
    b_prime: int
    probability: float


def _row_measurements(reg, guesser, target, b_prime, guess, bit, others):
    n = reg.n_parties
    axis = "Z" if b_prime == 0 else "X"
    ms = []
    for k in range(n):
        name = reg.names[k]
        if k == guesser:
            out = 0 if b_prime == 0 else guess
            ms.append(LocalMeasurement(name, guess, out, axis))
        elif k == target:
            alpha = others.get(k, 0)
            # the right-hand target re-encodes its bit against its own outcome
            out = bit if b_prime == 0 else bit ^ alpha
            ms.append(LocalMeasurement(name, alpha, out, axis))
        else:
            ms.append(LocalMeasurement(name, others.get(k, 0), 0, axis))
    return ms


def guess_row(
    w: ProcessMatrix, guesser: int, b_prime: int, convention: str = "aligned", route: str = "auto"
) -> GuessRow:
    """Probability that party ``guesser`` guesses its neighbour's bit.

    ``b_prime = 0`` targets the left neighbour ``i - 1`` with Z inputs;
    ``b_prime = 1`` targets the right neighbour ``i + 1`` with X inputs.
    Under ``convention="aligned"`` every other party reports outcome 0 and
    prepares 0, and the trace is rescaled by ``2^{𝒩-1}``; this is the
    branch on which every channel of ``W`` is read out coherently.
    ``convention="marginal"`` sums over the input outcomes of every party
    except the guesser, which is the plain probability of a correct guess.
    """
    reg = w.register
    n = reg.n_parties
    if b_prime not in (0, 1):
        raise ValidationError("b_prime must be 0 or 1")
    target = (guesser - 1) % n if b_prime == 0 else (guesser + 1) % n
    others = [k for k in range(n) if k != guesser]
    total = 0.0
    for bit in (0, 1):
        if convention == "aligned":
            ms = _row_measurements(reg, guesser, target, b_prime, bit, bit, {})
            total += 2.0 ** (n - 1) * outcome_probability(w, ms, route)
        elif convention == "marginal":
            for outs in itertools.product((0, 1), repeat=len(others)):
                ms = _row_measurements(reg, guesser, target, b_prime, bit, bit, dict(zip(others, outs)))
                total += outcome_probability(w, ms, route)
        else:
            raise ValidationError(f"unknown convention {convention!r}")
    g, t = reg.names[guesser], reg.names[target]
    label = f"P_{g}(guess={t.lower()}, b'={b_prime})"
    return GuessRow(label, g, t, b_prime, total / 2.0)


def guess_rows(w: ProcessMatrix, convention: str = "aligned", route: str = "auto") -> list[GuessRow]:
    """All ``2𝒩`` rows: every party guessing left, then every party guessing right."""
    n = w.register.n_parties
    return [guess_row(w, i, bp, convention, route) for bp in (0, 1) for i in range(n)]


def multi_party_game(
    n_parties: int, f0: float, f1: float, convention: str = "aligned", route: str = "auto"
) -> GameOutcome:
    """Average left and right row probabilities on ``build_w_general``."""
    w = build_w_general(n_parties, f0, f1)
    rows = guess_rows(w, convention, route)
    left = [r.probability for r in rows if r.b_prime == 0]
    right = [r.probability for r in rows if r.b_prime == 1]
    return GameOutcome(float(np.mean(left)), float(np.mean(right)))


def classical_bound(n_parties: int) -> tuple[Fraction, Fraction, Fraction]:
    """Best causally ordered ``(p_left, p_right, p_total)`` for the cyclic game.

    In any fixed order exactly one party cannot learn its left neighbour,
    and exactly one can learn its right neighbour.
    """
    n = int(n_parties)
    if n < 2:
        raise ValidationError("need at least two parties")
    left = 1 - Fraction(1, 2 * n)
    right = Fraction(1, 2) + Fraction(1, 2 * n)
    return left, right, (left + right) / 2


# ---------------------------------------------------------------- validity


@dataclass(frozen=True)
class ValidityReport:
    hermiticity_residual: float
    trace: float
    trace_deviation: float
    min_eigenvalue: float

    @property
    def valid(self) -> bool:
        return (
            self.hermiticity_residual <= 1e-12
            and self.trace_deviation <= TRACE_ATOL
            and self.min_eigenvalue >= -PSD_ATOL
        )


def validate_process(w: ProcessMatrix) -> ValidityReport:
    """Hermiticity, trace and positivity diagnostics; never raises on failure."""
    d = w.dense()
    m = d.matrix
    evals = np.linalg.eigvalsh(m)
    tr = float(np.trace(m).real)
    return ValidityReport(
        d.hermiticity_residual(),
        tr,
        abs(tr - 2.0 ** w.n_parties),
        float(evals[0]),
    )
