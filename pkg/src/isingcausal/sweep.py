"""Angle sweeps of ring observables, game probabilities and order parameters.

For a ring of ``N`` sites the two game functions are read off the ground
state as ``f0 = <Z_i Z_{i+2}>`` (written ``c_zz``) and
``f1 = <Z_i X_{i+1} Z_{i+2}>`` (written ``m_x``, the transverse field of
the controlled-Z image).  Records follow the multi-party convention
``p_left = (1 + f0)/2`` and ``p_right = (1 + f1)/2`` at every ``N``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import CapacityError, ValidationError
from .fermions import observables, solve_ground_state, string_expectation
from .kernel import OperatorExpr, dense_cap, eigensolve, expectation
from .lattice import ChainSpec, TfimSpec, build_hamiltonian
from .phases import QUARTER, mz_thermo, ostr_thermo

BACKENDS = ("dense", "fermion", "auto")
FORMATS = ("csv", "json")
CLASSICAL_BOUND = 0.75


@dataclass(frozen=True)
class SweepConfig:
    n_sites: int
    theta_min: float = 0.0
    theta_max: float = math.pi / 2
    steps: int = 65
    backend: str = "auto"
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        ChainSpec(self.n_sites, 0.0)
        if not (math.isfinite(self.theta_min) and math.isfinite(self.theta_max)):
            raise ValidationError("angle bounds must be finite")
        if not self.theta_min < self.theta_max:
            raise ValidationError("theta_min must be smaller than theta_max")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValidationError("steps must be an integer >= 2")
        if self.backend not in BACKENDS:
            raise ValidationError(f"backend must be one of {BACKENDS}")
        if self.format not in FORMATS:
            raise ValidationError(f"format must be one of {FORMATS}")
        if self.backend == "dense" and self.n_sites > dense_cap():
            raise CapacityError(
                f"dense backend limited to {dense_cap()} sites, got {self.n_sites}"
            )

    @property
    def resolved_backend(self) -> str:
        if self.backend != "auto":
            return self.backend
        return "dense" if self.n_sites <= dense_cap() else "fermion"

    def grid(self) -> np.ndarray:
        return np.linspace(self.theta_min, self.theta_max, int(self.steps))


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    n_sites: int
    m_x: float
    c_zz: float
    p_left: float
    p_right: float
    p_total: float
    k_avg: float
    m_z_thermo: float
    o_str_thermo: float
    o_str_finite: float
    classical_bound: float = CLASSICAL_BOUND


FIELDS = tuple(f.name for f in fields(SweepRecord))


def _thermo(fn, theta: float) -> float:
    if -1e-12 <= theta <= math.pi / 2 + 1e-12:
        return fn(theta)
    return math.nan


def _dense_observables(n: int, theta: float) -> tuple[float, float, float]:
    h = build_hamiltonian(ChainSpec(n, theta))
    psi = eigensolve(h, subset=(0, 0)).state(0)
    cl = OperatorExpr.build(n, [(1.0, {0: "Z", 1: "X", 2: "Z"})])
    zz = OperatorExpr.build(n, [(1.0, {0: "Z", 2: "Z"})])
    m_x = expectation(psi, cl)
    c_zz = expectation(psi, zz)
    pair = 0.5 * (OperatorExpr.identity(n) + cl) + 0.5 * (OperatorExpr.identity(n) + zz)
    return m_x, c_zz, 0.5 * expectation(psi, pair)


def sweep_point(n_sites: int, theta: float, backend: str = "fermion") -> SweepRecord:
    """One grid point of a sweep."""
    theta = float(theta)
    m = n_sites // 2
    gs = solve_ground_state(TfimSpec(m, theta))
    if backend == "dense":
        m_x, c_zz, k = _dense_observables(n_sites, theta)
    elif backend == "fermion":
        m_x, c_zz = observables(gs.correlation)
        k = 0.5 * (1.0 + 0.5 * (m_x + c_zz))
    else:
        raise ValidationError(f"backend must be 'dense' or 'fermion', got {backend!r}")
    p_left = 0.5 * (1.0 + c_zz)
    p_right = 0.5 * (1.0 + m_x)
    o_fin = string_expectation(gs.correlation, max(1, m // 2))
    return SweepRecord(
        theta, int(n_sites), m_x, c_zz, p_left, p_right,
        0.5 * (p_left + p_right), k,
        _thermo(mz_thermo, theta), _thermo(ostr_thermo, theta),
        0.0 if -1e-12 < o_fin < 0.0 else o_fin,
    )


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Records ordered by grid index."""
    backend = config.resolved_backend
    return [sweep_point(config.n_sites, t, backend) for t in config.grid()]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".15g")


def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in records:
        w.writerow([_fmt(getattr(r, f)) for f in FIELDS])
    return buf.getvalue()


def to_json(records) -> str:
    rows = []
    for r in records:
        row = asdict(r)
        for k, v in row.items():
            if isinstance(v, float) and not math.isfinite(v):
                row[k] = None
        rows.append(row)
    return json.dumps(rows, indent=1) + "\n"


def write_records(records, fmt: str, path: str | None = None) -> str:
    text = to_csv(records) if fmt == "csv" else to_json(records)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(text: str) -> list[dict]:
    """Parse CSV written by :func:`to_csv` back into dicts of numbers."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({k: (int(v) if k == "n_sites" else float(v)) for k, v in row.items()})
    return out


def peak_at_quarter(records) -> bool:
    """True when the largest ``p_total`` sits at the grid point nearest ``π/4``."""
    t = np.array([r.theta for r in records])
    p = np.array([r.p_total for r in records])
    return int(np.argmax(p)) == int(np.argmin(np.abs(t - QUARTER)))
