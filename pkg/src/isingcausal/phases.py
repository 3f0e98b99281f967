"""Order parameters of the Ising and cluster phases and location of the transition.

Thermodynamic formulas
----------------------
``m_z = (1 - tan²θ)^{1/8}`` below ``π/4`` and the string order
``O_str = (1 - cot²θ)^{1/4}`` above it.  The string order is the square of
the dual magnetization ``(1 - cot²θ)^{1/8}``.

Finite size
-----------
On a ring the magnetization vanishes by symmetry and the string over the
whole transverse-field ring is the conserved parity.  The finite-size
string order is therefore taken over half the ring,
``<Π_{j<M/2} X_j> = det(-G[:M/2, :M/2])``, which approaches
``(1 - cot²θ)^{1/4}`` as ``M`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .fermions import observables, solve_ground_state, string_expectation
from .lattice import TfimSpec

QUARTER = math.pi / 4
RANGE_ATOL = 1e-12


def _in_range(theta) -> float:
    t = float(theta)
    if not (-RANGE_ATOL <= t <= math.pi / 2 + RANGE_ATOL):
        raise ValidationError(f"theta must lie in [0, pi/2], got {t}")
    return min(max(t, 0.0), math.pi / 2)


def mz_thermo(theta) -> float:
    """Longitudinal magnetization of the infinite chain."""
    t = _in_range(theta)
    if t >= QUARTER:
        return 0.0
    return (1.0 - math.tan(t) ** 2) ** 0.125


def ostr_thermo(theta) -> float:
    """String order of the infinite chain, the squared dual magnetization."""
    t = _in_range(theta)
    if t <= QUARTER:
        return 0.0
    cot = math.cos(t) / math.sin(t)
    return (1.0 - cot * cot) ** 0.25


def ostr_finite(spec: TfimSpec, length: int | None = None) -> float:
    """Half-ring string ``det(-G[:ℓ, :ℓ])`` with ``ℓ = M // 2`` by default.

    Negative rounding noise in the disordered-string regime is clipped to 0.
    """
    gs = solve_ground_state(spec)
    ell = max(1, spec.m_sites // 2) if length is None else int(length)
    return _clip_noise(string_expectation(gs.correlation, ell))


def _clip_noise(value: float) -> float:
    return 0.0 if -1e-12 < value < 0.0 else value


@dataclass(frozen=True)
class OrderParameters:
    theta: float
    n_sites: int
    m_x: float
    c_zz: float
    m_z_thermo: float
    o_str_thermo: float
    o_str_finite: float

    def __post_init__(self):
        if self.theta != QUARTER and self.m_z_thermo * self.o_str_thermo != 0.0:
            raise ValidationError("thermodynamic order parameters must have disjoint support")


def order_parameters(n_sites: int, theta) -> OrderParameters:
    """All order parameters of the ``n_sites`` ring via the fermion solution."""
    if n_sites % 2 or n_sites < 4:
        raise ValidationError(f"n_sites must be even and >= 4, got {n_sites}")
    spec = TfimSpec(n_sites // 2, theta)
    gs = solve_ground_state(spec)
    m_x, c_zz = observables(gs.correlation)
    ell = max(1, spec.m_sites // 2)
    o_fin = string_expectation(gs.correlation, ell)
    return OrderParameters(
        float(theta), int(n_sites), m_x, c_zz,
        mz_thermo(theta), ostr_thermo(theta), _clip_noise(o_fin),
    )


@dataclass(frozen=True)
class QptEstimate:
    """Transition estimates from a sweep."""

    theta_argmax: float
    theta_refined: float
    peak_value: float
    theta_crossing: float | None
    grid_spacing: float


def refine_peak(thetas: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Grid argmax and the vertex of the parabola through its two neighbours.

    Returns ``(theta_argmax, theta_refined, peak_value)``.  A maximum at the
    grid edge is returned unrefined.
    """
    t = np.asarray(thetas, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != v.shape:
        raise ValidationError("thetas and values must be 1-d arrays of equal length")
    if t.size < 3:
        raise ValidationError("need at least three grid points")
    if not np.all(np.isfinite(v)) or not np.all(np.isfinite(t)):
        raise ValidationError("non-finite sweep values")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("angles must be strictly increasing")
    k = int(np.argmax(v))
    if k == 0 or k == t.size - 1:
        return float(t[k]), float(t[k]), float(v[k])
    x0, x1, x2 = t[k - 1 : k + 2]
    y0, y1, y2 = v[k - 1 : k + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0:
        raise ValidationError("flat or convex neighbourhood around the maximum")
    vertex = -b / (2 * a)
    c = y1 - a * x1 * x1 - b * x1
    return float(t[k]), float(vertex), float(a * vertex * vertex + b * vertex + c)


def locate_qpt(records, key: str = "k_avg") -> QptEstimate:
    """Transition angle from sweep records (objects or mappings with ``theta``)."""
    def get(r, name):
        return r[name] if isinstance(r, dict) else getattr(r, name)

    recs = list(records)
    if len(recs) < 3:
        raise ValidationError("need at least three records")
    t = np.array([get(r, "theta") for r in recs], dtype=float)
    v = np.array([get(r, key) for r in recs], dtype=float)
    arg, refined, peak = refine_peak(t, v)
    crossing = None
    try:
        mz = np.array([get(r, "m_z_thermo") for r in recs], dtype=float)
        os_ = np.array([get(r, "o_str_thermo") for r in recs], dtype=float)
        crossing = float(t[int(np.argmin(np.abs(mz - os_)))])
    except (KeyError, AttributeError):
        pass
    return QptEstimate(arg, refined, peak, crossing, float(np.max(np.diff(t))))
