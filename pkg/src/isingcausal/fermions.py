"""Jordan-Wigner free-fermion solution of the periodic transverse-field Ising ring.

The ring ``-cosθ Σ Z_i Z_{i+1} - sinθ Σ X_i`` becomes the quadratic form
``Σ c_i† A_ij c_j + (c_i† B_ij c_j† + h.c.)/2`` whose boundary bond
depends on the fermion parity sector.  ``sector="antiperiodic"`` keeps the
boundary entries with the sign written for the textbook convention;
``"periodic"`` flips them.  ``"auto"`` solves both, keeps only states whose
parity is allowed in each sector, and returns the lower energy.

Notes
-----
The Bogoliubov modes come from the singular value decomposition
``A - B = U diag(Λ) Vᵀ``: the rows of ``Vᵀ`` are ``ψ_k``, the rows of
``Uᵀ`` are ``φ_k`` and ``(A+B)(A-B) ψ_kᵀ = Λ_k² ψ_kᵀ``.  This pairs zero
modes without dividing by ``Λ_k``.

The correlation matrix ``G = Σ_k s_k ψ_kᵀ φ_k`` (``s_k = -1`` for an
occupied mode) gives

    <X_i> = -G_ii,   <Z_i Z_{i+1}> = -G_{i,i+1},
    <Π_{j<ℓ} X_j> = det(-G[:ℓ, :ℓ]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .lattice import TfimSpec

SECTORS = ("antiperiodic", "periodic")
SYM_ATOL = 1e-14
ORTHO_ATOL = 1e-10
G_SLACK = 1e-10
TIE_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadraticForm:
    """``A`` (symmetric) and ``B`` (antisymmetric) of one parity sector."""

    m_sites: int
    a_matrix: np.ndarray = field(repr=False)
    b_matrix: np.ndarray = field(repr=False)
    sector: str = "antiperiodic"

    def __post_init__(self):
        a, b = _frozen(self.a_matrix), _frozen(self.b_matrix)
        m = self.m_sites
        if a.shape != (m, m) or b.shape != (m, m):
            raise ValidationError(f"A and B must be {m}x{m}")
        if np.max(np.abs(a - a.T)) > SYM_ATOL:
            raise ValidationError("A is not symmetric")
        if np.max(np.abs(b + b.T)) > SYM_ATOL:
            raise ValidationError("B is not antisymmetric")
        if self.sector not in SECTORS:
            raise ValidationError(f"sector must be one of {SECTORS}, got {self.sector!r}")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)

    @property
    def allowed_parity(self) -> int:
        """Eigenvalue of ``Π X_j`` compatible with this boundary sign."""
        sign = 1 if self.sector == "antiperiodic" else -1
        return sign * (-1) ** self.m_sites


@dataclass(frozen=True)
class ModeDecomposition:
    """Mode energies ``Λ_k`` (ascending) and row-stacked vectors ``ψ``, ``φ``."""

    lambdas: np.ndarray
    psi: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("lambdas", "psi", "phi"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.lambdas < 0):
            raise ValidationError("mode energies must be non-negative")

    @property
    def m_sites(self) -> int:
        return self.lambdas.size

    def orthonormality_residual(self) -> float:
        eye = np.eye(self.m_sites)
        return float(max(
            np.max(np.abs(self.psi @ self.psi.T - eye)),
            np.max(np.abs(self.phi @ self.phi.T - eye)),
        ))


@dataclass(frozen=True)
class CorrelationMatrix:
    """``G`` with ``|G_ij| <= 1`` up to rounding."""

    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = _frozen(self.g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError("G must be square")
        if np.max(np.abs(g)) > 1.0 + G_SLACK:
            raise NumericalError(f"|G| exceeds 1: {np.max(np.abs(g)):.3e}")
        object.__setattr__(self, "g", g)

    @property
    def m_sites(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class FermionGroundState:
    """Ground state of one ring: energy, ``G`` and how it was selected."""

    energy: float
    correlation: CorrelationMatrix
    sector: str
    parity: int
    occupied: tuple[int, ...] = ()


def build_quadratic_form(spec: TfimSpec, sector: str = "antiperiodic") -> QuadraticForm:
    """``A_ij = -c(δ_{j,i+1} + δ_{i,j+1}) - 2s δ_ij``, ``B_ij = -c(δ_{j,i+1} - δ_{i,j+1})``.

    The wrap-around entries are ``A_{0,M-1} = A_{M-1,0} = ±c`` and
    ``B_{0,M-1} = -B_{M-1,0} = ∓c`` with the upper sign for
    ``sector="antiperiodic"``.
    """
    if sector not in SECTORS:
        raise ValidationError(f"sector must be one of {SECTORS}, got {sector!r}")
    m = spec.m_sites
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    up = np.eye(m, k=1)
    a = -c * (up + up.T) - 2.0 * s * np.eye(m)
    b = -c * (up - up.T)
    sign = 1.0 if sector == "antiperiodic" else -1.0
    a[0, m - 1] += sign * c
    a[m - 1, 0] += sign * c
    b[0, m - 1] -= sign * c
    b[m - 1, 0] += sign * c
    return QuadraticForm(m, a, b, sector)


def solve_modes(q: QuadraticForm) -> ModeDecomposition:
    """Bogoliubov modes of a quadratic form, ``Λ`` ascending."""
    try:
        u, lam, vt = np.linalg.svd(q.a_matrix - q.b_matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"mode decomposition failed: {exc}") from exc
    order = np.argsort(lam, kind="stable")
    return ModeDecomposition(lam[order], vt[order], u.T[order])


def correlation_matrix(modes: ModeDecomposition, occupied=()) -> CorrelationMatrix:
    """``G = Σ_k s_k ψ_kᵀ φ_k`` with ``s_k = -1`` for modes listed in ``occupied``."""
    signs = np.ones(modes.m_sites)
    for k in occupied:
        signs[k] = -1.0
    return CorrelationMatrix(modes.psi.T @ (signs[:, None] * modes.phi))


def mode_energy(modes: ModeDecomposition, occupied=()) -> float:
    """``-Σ_k Λ_k / 2 + Σ_{k occupied} Λ_k``."""
    lam = modes.lambdas
    return float(-0.5 * lam.sum() + sum(lam[k] for k in occupied))


def _parity(g: CorrelationMatrix) -> int:
    return 1 if np.linalg.det(-g.g) > 0 else -1


def sector_ground_state(spec: TfimSpec, sector: str) -> FermionGroundState:
    """Lowest state of one boundary sector that has that sector's parity."""
    q = build_quadratic_form(spec, sector)
    modes = solve_modes(q)
    occupied: tuple[int, ...] = ()
    g = correlation_matrix(modes)
    parity = _parity(g)
    if parity != q.allowed_parity:
        occupied = (0,)
        g = correlation_matrix(modes, occupied)
        parity = -parity
    return FermionGroundState(mode_energy(modes, occupied), g, sector, parity, occupied)


def solve_ground_state(spec: TfimSpec, sector: str = "auto") -> FermionGroundState:
    """Ground state of the ring.

    ``sector="auto"`` compares both boundary sectors after parity
    projection.  An exact tie (classical point) goes to the parity ``+1``
    state.  A fixed sector returns the vacuum of that sector without
    parity projection.
    """
    if sector in SECTORS:
        q = build_quadratic_form(spec, sector)
        modes = solve_modes(q)
        g = correlation_matrix(modes)
        return FermionGroundState(mode_energy(modes), g, sector, _parity(g))
    if sector != "auto":
        raise ValidationError(f"sector must be 'auto' or one of {SECTORS}, got {sector!r}")
    cands = [sector_ground_state(spec, s) for s in SECTORS]
    scale = max(1.0, abs(cands[0].energy))
    if abs(cands[0].energy - cands[1].energy) <= TIE_RTOL * scale * spec.m_sites:
        return cands[0] if cands[0].parity == 1 else cands[1]
    return min(cands, key=lambda c: c.energy)


def observables(g: CorrelationMatrix) -> tuple[float, float]:
    """``(m_x, c_zz) = (-G_00, -G_01)`` on a translation-invariant ring."""
    m_x = -float(g.g[0, 0])
    c_zz = -float(g.g[0, 1 % g.m_sites])
    return m_x, c_zz


def string_expectation(g: CorrelationMatrix, length: int | None = None) -> float:
    """``<Π_{j<ℓ} X_j> = det(-G[:ℓ, :ℓ])``.

    The default ``ℓ = M`` is the whole ring, which is the fermion parity
    and therefore ``±1`` on any parity eigenstate.
    """
    m = g.m_sites
    ell = m if length is None else int(length)
    if not 1 <= ell <= m:
        raise ValidationError(f"string length must lie in 1..{m}, got {ell}")
    return float(np.linalg.det(-g.g[:ell, :ell]))


def tfim_observables(spec: TfimSpec, sector: str = "auto") -> dict:
    """Convenience bundle: energy, ``m_x``, ``c_zz`` and the full-ring string."""
    gs = solve_ground_state(spec, sector)
    m_x, c_zz = observables(gs.correlation)
    return {
        "energy": gs.energy,
        "m_x": m_x,
        "c_zz": c_zz,
        "string": string_expectation(gs.correlation),
        "sector": gs.sector,
    }
