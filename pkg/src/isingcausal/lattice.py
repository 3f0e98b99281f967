"""Ising-cluster ring Hamiltonians and their map onto transverse-field Ising rings.

Sites are 0-based and periodic.  The ring Hamiltonian

    H = -J Σ_i Z_i Z_{i+2} - sinθ Σ_i Z_i X_{i+1} Z_{i+2}

uses ``J = 2cosθ`` with only two Ising bonds on the 4-site ring (the
game Hamiltonian) and ``J = cosθ`` with ``N`` bonds for ``N >= 6``.
Conjugating by the ring of controlled-Z gates turns every cluster term
into a single ``X`` and leaves the Ising bonds alone, so the ring splits
into two independent transverse-field Ising rings on the even and odd
sublattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .kernel import (
    DenseOperator,
    OperatorExpr,
    PauliTerm,
    _check_capacity,
    to_dense,
)

SPLIT_ATOL = 1e-12


def _check_theta(theta) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValidationError(f"theta must be finite, got {theta}")
    return theta


@dataclass(frozen=True)
class ChainSpec:
    """Periodic Ising-cluster ring of ``n_sites`` (even, >= 4) at angle ``theta``."""

    n_sites: int
    theta: float

    def __post_init__(self):
        n = self.n_sites
        if isinstance(n, bool) or int(n) != n:
            raise ValidationError(f"n_sites must be an integer, got {n!r}")
        n = int(n)
        if n < 4 or n % 2:
            raise ValidationError(f"n_sites must be even and >= 4, got {n}")
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "theta", _check_theta(self.theta))

    @property
    def boundary(self) -> str:
        return "periodic"


@dataclass(frozen=True)
class TfimSpec:
    """Periodic transverse-field Ising ring of ``m_sites`` (>= 2)."""

    m_sites: int
    theta: float

    def __post_init__(self):
        m = self.m_sites
        if isinstance(m, bool) or int(m) != m:
            raise ValidationError(f"m_sites must be an integer, got {m!r}")
        m = int(m)
        if m < 2:
            raise ValidationError(f"m_sites must be >= 2, got {m}")
        object.__setattr__(self, "m_sites", m)
        object.__setattr__(self, "theta", _check_theta(self.theta))


def _cluster_terms(n: int, weight: float) -> list[PauliTerm]:
    if weight == 0.0:
        return []
    return [
        PauliTerm(weight, ((i, "Z"), ((i + 1) % n, "X"), ((i + 2) % n, "Z")))
        for i in range(n)
    ]


def build_game_hamiltonian(theta) -> OperatorExpr:
    """Four-site game Hamiltonian with Ising weight ``2cosθ`` on two bonds.

    Examples
    --------
    >>> h = build_game_hamiltonian(0.0)
    >>> len(h), h.coefficient({0: "Z", 2: "Z"})
    (2, -2.0)
    """
    theta = _check_theta(theta)
    c, s = math.cos(theta), math.sin(theta)
    terms = []
    if c != 0.0:
        terms += [PauliTerm(-2.0 * c, ((0, "Z"), (2, "Z"))), PauliTerm(-2.0 * c, ((1, "Z"), (3, "Z")))]
    terms += _cluster_terms(4, -s)
    return OperatorExpr(4, terms)


def build_chain_hamiltonian(spec: ChainSpec) -> OperatorExpr:
    """Ring Hamiltonian with ``N`` next-nearest Ising bonds, ``N >= 6``."""
    n = spec.n_sites
    if n < 6:
        raise ValidationError(
            "the 4-site ring uses build_game_hamiltonian (doubled Ising weight)"
        )
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    terms = []
    if c != 0.0:
        terms = [PauliTerm(-c, ((i, "Z"), ((i + 2) % n, "Z"))) for i in range(n)]
    terms += _cluster_terms(n, -s)
    return OperatorExpr(n, terms)


def build_hamiltonian(spec: ChainSpec) -> OperatorExpr:
    """Dispatch on ring size: the game Hamiltonian at 4 sites, the chain otherwise."""
    if spec.n_sites == 4:
        return build_game_hamiltonian(spec.theta)
    return build_chain_hamiltonian(spec)


def cz_phases(n_sites: int) -> np.ndarray:
    """Diagonal of the periodic controlled-Z ring, ``(-1)**Σ b_i b_{i+1}``."""
    n = int(n_sites)
    if n < 2:
        raise ValidationError("the controlled-Z ring needs at least 2 sites")
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    # for n=2 the two periodic gates act on the same pair and cancel
    count = sum(bits[:, i] * bits[:, (i + 1) % n] for i in range(n))
    return np.where(count % 2, -1.0, 1.0)


def build_cz_circuit(n_sites: int) -> DenseOperator:
    """Dense ``U = Π_i CZ_{i,i+1}`` on a periodic ring."""
    _check_capacity(int(n_sites))
    return DenseOperator(int(n_sites), np.diag(cz_phases(n_sites)))


def cz_conjugate(expr: OperatorExpr) -> OperatorExpr:
    """Symbolic ``U expr U†`` for the controlled-Z ring.

    ``X_j`` and ``Y_j`` pick up ``Z`` on both ring neighbours, ``Z`` is
    unchanged.  Products of ``Z`` factors are reduced with their signs.
    """
    n = expr.register_size
    if n < 3:
        raise ValidationError("symbolic conjugation assumes a ring of >= 3 sites")
    out = [PauliTerm(*_conjugate_string(term, n)) for term in expr]
    return OperatorExpr(n, out)


def _conjugate_string(term: PauliTerm, n: int):
    result = {}  # site -> axis
    phase = 1 + 0j
    for site, axis in term.factors:
        if axis == "Z":
            image = [(site, "Z")]
        elif axis == "X":
            image = [((site - 1) % n, "Z"), (site, "X"), ((site + 1) % n, "Z")]
        else:  # Y = iXZ maps to Z Y Z
            image = [((site - 1) % n, "Z"), (site, "Y"), ((site + 1) % n, "Z")]
        for s, a in image:
            prev = result.get(s)
            if prev is None:
                result[s] = a
            else:
                ph2, axis2 = _mul_single(prev, a)
                phase *= ph2
                if axis2 == "I":
                    del result[s]
                else:
                    result[s] = axis2
    if abs(phase.imag) > 1e-15:
        raise ValidationError("conjugated string is not Hermitian")
    return term.coefficient * phase.real, tuple(sorted(result.items()))


_MUL = {
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _mul_single(a: str, b: str):
    if a == b:
        return 1, "I"
    return _MUL[(a, b)]


def build_tfim(spec: TfimSpec) -> OperatorExpr:
    """``-cosθ Σ Z_i Z_{i+1} - sinθ Σ X_i`` on a periodic ring of ``M`` sites.

    At ``M = 2`` the two bonds coincide and merge into ``-2cosθ Z_0 Z_1``.
    """
    m = spec.m_sites
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    terms = []
    if c != 0.0:
        terms += [PauliTerm(-c, ((i, "Z"), ((i + 1) % m, "Z"))) for i in range(m)]
    if s != 0.0:
        terms += [PauliTerm(-s, ((i, "X"),)) for i in range(m)]
    return OperatorExpr(m, terms)


def sublattice_tfims(spec: ChainSpec) -> OperatorExpr:
    """``H_even + H_odd`` embedded back on the ``N``-site ring."""
    n = spec.n_sites
    tfim = build_tfim(TfimSpec(n // 2, spec.theta))
    even = tfim.relabel([2 * k for k in range(n // 2)], n)
    odd = tfim.relabel([2 * k + 1 for k in range(n // 2)], n)
    return even + odd


def split_to_tfim(spec: ChainSpec, check: bool = True) -> tuple[TfimSpec, TfimSpec]:
    """Split the ring into even- and odd-sublattice transverse-field Ising rings.

    When ``check`` is true and the ring fits under the dense cap, the
    identity ``U H U† = H_even + H_odd`` is asserted on dense matrices.
    """
    m = TfimSpec(spec.n_sites // 2, spec.theta)
    if check:
        from .kernel import dense_cap

        if spec.n_sites <= dense_cap():
            h = to_dense(build_hamiltonian(spec)).matrix
            phases = cz_phases(spec.n_sites)
            rotated = phases[:, None] * h * phases[None, :]
            target = to_dense(sublattice_tfims(spec)).matrix
            err = float(np.max(np.abs(rotated - target)))
            if err > SPLIT_ATOL:
                raise AssertionError(
                    f"controlled-Z split failed at N={spec.n_sites}, theta={spec.theta}: {err:.3e}"
                )
    return m, m
