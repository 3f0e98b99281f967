"""Pauli-string operator algebra and dense linear algebra on small registers.

Operators are real-weighted sums of Pauli strings stored sparsely as
``(site, axis)`` factors.  Dense matrices use the ``np.kron`` ordering:
site 0 is the leftmost tensor factor.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import CapacityError, NumericalError, ValidationError

AXES = ("X", "Y", "Z")
DEFAULT_DENSE_CAP = 12
HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(axis: str) -> np.ndarray:
    """Return the 2x2 matrix for ``"I"``, ``"X"``, ``"Y"`` or ``"Z"``."""
    try:
        return _PAULI[axis.upper()].copy()
    except KeyError:
        raise ValidationError(f"unknown Pauli axis {axis!r}") from None


def dense_cap() -> int:
    """Largest register (in qubits) allowed for dense construction.

    Reads the ``DENSE_CAP`` environment variable on every call.
    """
    raw = os.environ.get("DENSE_CAP")
    if raw is None or raw == "":
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"DENSE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError("DENSE_CAP must be >= 1")
    return cap


def _check_capacity(n_qubits: int) -> None:
    cap = dense_cap()
    if n_qubits > cap:
        raise CapacityError(
            f"{n_qubits}-qubit register exceeds the dense cap of {cap} qubits"
        )


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * prod_i sigma_{axis_i}^{site_i}``.

    ``factors`` is stored sorted by site; an empty tuple is the identity.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        coeff = self.coefficient
        if isinstance(coeff, complex) or np.iscomplexobj(coeff):
            raise ValidationError("Pauli coefficients must be real")
        coeff = float(coeff)
        if not math.isfinite(coeff) or coeff == 0.0:
            raise ValidationError(f"coefficient must be finite and nonzero, got {coeff}")
        canon = []
        for site, axis in self.factors:
            axis = str(axis).upper()
            if axis not in AXES:
                raise ValidationError(f"unknown Pauli axis {axis!r}")
            if int(site) != site or site < 0:
                raise ValidationError(f"site index must be a non-negative integer, got {site}")
            canon.append((int(site), axis))
        canon.sort()
        sites = [s for s, _ in canon]
        if len(set(sites)) != len(sites):
            raise ValidationError(f"repeated site in Pauli term {self.factors}")
        object.__setattr__(self, "coefficient", coeff)
        object.__setattr__(self, "factors", tuple(canon))

    @property
    def max_site(self) -> int:
        return self.factors[-1][0] if self.factors else -1

    def masks(self, n_qubits: int) -> tuple[int, int, int]:
        """Return ``(xmask, zmask, n_y)`` in the kernel bit convention."""
        xmask = zmask = ny = 0
        for site, axis in self.factors:
            bit = 1 << (n_qubits - 1 - site)
            if axis in ("X", "Y"):
                xmask |= bit
            if axis in ("Z", "Y"):
                zmask |= bit
            if axis == "Y":
                ny += 1
        return xmask, zmask, ny


def _as_factors(spec) -> tuple[tuple[int, str], ...]:
    if isinstance(spec, Mapping):
        return tuple(spec.items())
    if isinstance(spec, str):
        # dense label such as "ZIXZ"
        return tuple((i, a) for i, a in enumerate(spec.upper()) if a != "I")
    return tuple(spec)


class OperatorExpr:
    """Real linear combination of Pauli strings on ``register_size`` qubits.

    Terms with identical factor sets are merged on construction and exact
    zeros are dropped, so two expressions describing the same operator
    compare equal term by term.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, register_size: int, terms: Iterable[PauliTerm] = ()):
        if int(register_size) != register_size or register_size < 1:
            raise ValidationError(f"register size must be a positive integer, got {register_size}")
        n = int(register_size)
        merged: dict[tuple, float] = {}
        for term in terms:
            if term.max_site >= n:
                raise ValidationError(
                    f"site {term.max_site} outside a {n}-qubit register"
                )
            merged[term.factors] = merged.get(term.factors, 0.0) + term.coefficient
        self._n = n
        self._terms = tuple(
            PauliTerm(c, f) for f, c in sorted(merged.items()) if c != 0.0
        )

    @classmethod
    def build(cls, register_size: int, spec: Iterable) -> "OperatorExpr":
        """Build from ``(coefficient, factors)`` pairs.

        ``factors`` may be a ``{site: axis}`` mapping, a sequence of
        ``(site, axis)`` pairs or a dense label like ``"ZIXZ"``.  Zero
        coefficients are skipped.
        """
        terms = []
        for coeff, factors in spec:
            if coeff == 0:
                continue
            terms.append(PauliTerm(coeff, _as_factors(factors)))
        return cls(register_size, terms)

    @classmethod
    def identity(cls, register_size: int, coefficient: float = 1.0) -> "OperatorExpr":
        return cls.build(register_size, [(coefficient, ())])

    @classmethod
    def zero(cls, register_size: int) -> "OperatorExpr":
        return cls(register_size)

    @property
    def register_size(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coefficient(self, factors) -> float:
        """Coefficient of one Pauli string (0.0 when absent)."""
        key = PauliTerm(1.0, _as_factors(factors)).factors
        for term in self._terms:
            if term.factors == key:
                return term.coefficient
        return 0.0

    @property
    def identity_coefficient(self) -> float:
        return self.coefficient(())

    def is_real(self) -> bool:
        """True when every string carries an even number of Y factors."""
        return all(sum(a == "Y" for _, a in t.factors) % 2 == 0 for t in self._terms)

    def _check_compatible(self, other: "OperatorExpr"):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        if other._n != self._n:
            raise ValidationError(
                f"register size mismatch: {self._n} vs {other._n}"
            )
        return None

    def __add__(self, other):
        if isinstance(other, (int, float)) and not isinstance(other, bool):
            return self + OperatorExpr.identity(self._n, other) if other else self
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return OperatorExpr(self._n, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, complex) or np.iscomplexobj(scalar):
            raise ValidationError("complex scalars are not supported")
        scalar = float(scalar)
        if scalar == 0.0:
            return OperatorExpr(self._n)
        scaled = ((t.coefficient * scalar, t.factors) for t in self._terms)
        # products can underflow to zero
        return OperatorExpr(self._n, [PauliTerm(c, f) for c, f in scaled if c != 0.0])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, self._terms))

    def allclose(self, other: "OperatorExpr", atol: float = 1e-12) -> bool:
        """Term-wise comparison of coefficients."""
        self._check_compatible(other)
        diff = self - other
        return all(abs(t.coefficient) <= atol for t in diff)

    def relabel(self, mapping: Sequence[int], register_size: int) -> "OperatorExpr":
        """Move site ``i`` to ``mapping[i]`` on a register of ``register_size``."""
        terms = [
            PauliTerm(t.coefficient, tuple((mapping[s], a) for s, a in t.factors))
            for t in self._terms
        ]
        return OperatorExpr(register_size, terms)

    def kernel_arrays(self):
        n = self._n
        if not self._terms:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty, np.zeros(0)
        masks = np.array([t.masks(n) for t in self._terms], dtype=np.int64)
        coeffs = np.array([t.coefficient for t in self._terms])
        return masks[:, 0], masks[:, 1], masks[:, 2], coeffs

    def __repr__(self):
        if not self._terms:
            return f"OperatorExpr({self._n}, 0)"
        parts = []
        for t in self._terms:
            label = "".join(f"{a}{s}" for s, a in t.factors) or "I"
            parts.append(f"{t.coefficient:+.6g}*{label}")
        return f"OperatorExpr({self._n}, {' '.join(parts)})"


def pauli(register_size: int, factors, coefficient: float = 1.0) -> OperatorExpr:
    """Single Pauli string, e.g. ``pauli(4, {0: "Z", 2: "Z"})``."""
    return OperatorExpr.build(register_size, [(coefficient, factors)])


@dataclass(frozen=True)
class DenseOperator:
    """Dense ``2**n x 2**n`` matrix on an ``n``-qubit register."""

    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, copy=True)
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise ValidationError(
                f"expected a {dim}x{dim} matrix for {self.n_qubits} qubits, got {m.shape}"
            )
        if not np.all(np.isfinite(m)):
            raise ValidationError("dense operator has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def hermiticity_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return self.hermiticity_residual() <= atol * max(1.0, float(np.max(np.abs(self.matrix))))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on ``n_qubits`` qubits."""

    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = v.size.bit_length() - 1
        if v.size < 2 or (1 << n) != v.size:
            raise ValidationError(f"state length {v.size} is not a power of two >= 2")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValidationError(f"state norm {norm!r} differs from 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(v / norm)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        v = np.zeros(1 << len(bits), dtype=complex)
        v[int(bits, 2)] = 1.0
        return cls(v)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition with ascending eigenvalues and column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def __len__(self):
        return self.eigenvalues.size

    def state(self, k: int) -> StateVector:
        return StateVector.normalized(self.eigenvectors[:, k])

    def degenerate_blocks(self, atol: float = 1e-9) -> list[tuple[int, int]]:
        """Half-open index ranges of (numerically) degenerate eigenvalues."""
        w = self.eigenvalues
        blocks, start = [], 0
        for k in range(1, w.size + 1):
            if k == w.size or w[k] - w[start] > atol:
                blocks.append((start, k))
                start = k
        return blocks


def _matrix_of(op) -> tuple[np.ndarray, int]:
    if isinstance(op, DenseOperator):
        return op.matrix, op.n_qubits
    if isinstance(op, OperatorExpr):
        d = to_dense(op)
        return d.matrix, d.n_qubits
    m = np.asarray(op)
    n = m.shape[0].bit_length() - 1
    return m, n


def to_dense(expr: OperatorExpr) -> DenseOperator:
    """Dense matrix of an operator expression.

    Real dtype is used when no string has an odd number of Y factors.
    Raises :class:`CapacityError` above :func:`dense_cap` qubits.
    """
    n = expr.register_size
    _check_capacity(n)
    x, z, ny, c = expr.kernel_arrays()
    mat = _kernels.pauli_dense(x, z, ny, c, n, expr.is_real())
    return DenseOperator(n, mat)


def apply(expr: OperatorExpr, state) -> np.ndarray:
    """``expr |state>`` without forming the dense matrix."""
    v = state.amplitudes if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    if v.size != 1 << expr.register_size:
        raise ValidationError(
            f"state of length {v.size} does not match a {expr.register_size}-qubit operator"
        )
    x, z, ny, c = expr.kernel_arrays()
    return _kernels.pauli_apply(x, z, ny, c, v)


def eigensolve(op, subset: tuple[int, int] | None = None) -> Spectrum:
    """Full (or index-subset) spectrum of a Hermitian operator.

    ``subset=(lo, hi)`` requests eigenpairs ``lo..hi`` inclusive, still via a
    dense LAPACK driver.
    """
    m, _ = _matrix_of(op)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    resid = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if resid > HERMITIAN_ATOL * scale:
        raise ValidationError(f"operator is not Hermitian (residual {resid:.3e})")
    try:
        if subset is None:
            w, v = np.linalg.eigh(m)
        else:
            w, v = scipy.linalg.eigh(m, subset_by_index=list(subset))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return Spectrum(w, v)


def expectation(state: StateVector, op) -> float:
    """Real expectation value ``<psi|O|psi>`` of a Hermitian observable."""
    v = state.amplitudes
    if isinstance(op, OperatorExpr):
        if op.register_size != state.n_qubits:
            raise ValidationError(
                f"{op.register_size}-qubit operator vs {state.n_qubits}-qubit state"
            )
        value = np.vdot(v, apply(op, v))
    else:
        m, n = _matrix_of(op)
        if n != state.n_qubits:
            raise ValidationError(f"{n}-qubit operator vs {state.n_qubits}-qubit state")
        value = np.vdot(v, m @ v)
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise NumericalError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def reduced_density(state: StateVector, keep: Iterable[int]) -> DenseOperator:
    """Partial trace onto ``keep``; kept sites appear in ascending order."""
    n = state.n_qubits
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValidationError("keep must name at least one site")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValidationError(f"sites {keep} outside a {n}-qubit register")
    traced = [q for q in range(n) if q not in keep]
    psi = state.amplitudes.reshape((2,) * n)
    rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    k = len(keep)
    # axes are (kept..., kept*...) in ascending site order
    rho = rho.reshape(1 << k, 1 << k)
    return DenseOperator(k, rho)


def commutator_norm(a, b) -> float:
    """Max-norm of ``AB - BA`` (dense)."""
    ma, na = _matrix_of(a)
    mb, nb = _matrix_of(b)
    if na != nb:
        raise ValidationError(f"register size mismatch: {na} vs {nb}")
    c = ma @ mb - mb @ ma
    return float(np.max(np.abs(c))) if c.size else 0.0


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out
