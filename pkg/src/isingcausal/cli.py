"""Command-line interface: ``sweep``, ``verify``, ``classify`` and ``game``."""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Callable, Iterable

import numpy as np

from . import correspondence, fermions, game, lattice, sweep
from .errors import CapacityError, CorrespondenceError, NumericalError, ValidationError
from .kernel import dense_cap, eigensolve, to_dense

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _angle(args, name: str, default: float) -> float:
    over_pi = getattr(args, f"{name}_over_pi", None)
    if over_pi is not None:
        return over_pi * math.pi
    value = getattr(args, name, None)
    return default if value is None else value


# ---------------------------------------------------------------- sweep


def cmd_sweep(args) -> int:
    config = sweep.SweepConfig(
        n_sites=args.n,
        theta_min=_angle(args, "theta_min", 0.0),
        theta_max=_angle(args, "theta_max", math.pi / 2),
        steps=args.steps,
        backend=args.backend,
        output=args.output,
        format=args.format,
    )
    records = sweep.run_sweep(config)
    text = sweep.write_records(records, config.format, config.output)
    if config.output is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(records)} records to {config.output}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- verify


class _Suite:
    def __init__(self):
        self.results: list[tuple[str, bool, str]] = []

    def check(self, name: str, fn: Callable[[], tuple[bool, str]]):
        try:
            ok, detail = fn()
        except (ValidationError, NumericalError, CorrespondenceError, AssertionError) as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.results.append((name, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}", flush=True)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.results)


def _max_dev(values: Iterable[float]) -> float:
    return max(values, default=0.0)


def _check_identity(grid):
    devs = [correspondence.verify_eq10(t, raise_on_fail=False).max_deviation for t in grid]
    dev = _max_dev(devs)
    return dev <= 1e-10, f"max deviation {dev:.2e} over {len(grid)} angles"


def _check_variants():
    vals = [correspondence.verify_eq10(0.6, v, raise_on_fail=False) for v in correspondence.PAIR_VARIANTS]
    dev = _max_dev(r.max_deviation for r in vals)
    return dev <= 1e-10, f"max deviation {dev:.2e} over {len(vals)} site choices"


def _check_rho(grid):
    reps = [correspondence.verify_rho134(t) for t in grid]
    dev = _max_dev(r.max_deviation for r in reps)
    return all(r.ok for r in reps), f"max deviation {dev:.2e}"


def _check_table1(grid):
    rows = [row for t in grid for row in correspondence.table1_catalog(t)]
    dev = _max_dev(r.max_deviation for r in rows)
    return dev <= 1e-10, f"{len(rows)} rows, max deviation {dev:.2e}"


def _check_two_party(grid):
    dev = 0.0
    for t in grid:
        o = game.two_party_game(t)
        dev = max(dev, abs(o.p_alice - (1 + math.sin(t)) / 2), abs(o.p_bob - (1 + math.cos(t)) / 2))
    return dev <= 1e-12, f"max deviation {dev:.2e}"


def _check_w_valid(grid):
    worst = min(game.validate_process(game.build_w_opt(t)).min_eigenvalue for t in grid)
    worst3 = min(
        game.validate_process(game.build_w_three(math.cos(t), math.sin(t))).min_eigenvalue
        for t in grid
    )
    return min(worst, worst3) >= -1e-10, f"min eigenvalues {worst:.2e} (2 parties), {worst3:.2e} (3 parties)"


def _check_bounds():
    from fractions import Fraction as F

    ok = all(
        game.classical_bound(n) == (1 - F(1, 2 * n), F(1, 2) + F(1, 2 * n), F(3, 4))
        for n in (2, 3, 10)
    )
    return ok, "exact fractions for 2, 3 and 10 parties"


def _check_split(sizes, grid):
    for n in sizes:
        for t in grid:
            lattice.split_to_tfim(lattice.ChainSpec(n, t))
    return True, f"sizes {list(sizes)}, {len(grid)} angles"


def _check_spectrum_mirror(grid):
    dev = 0.0
    for t in grid:
        a = eigensolve(lattice.build_game_hamiltonian(t)).eigenvalues
        b = eigensolve(lattice.build_game_hamiltonian(t + math.pi)).eigenvalues
        dev = max(dev, float(np.max(np.abs(a + b[::-1]))))
    return dev <= 1e-10, f"max deviation {dev:.2e}"


def _ed_tfim(m: int, theta: float):
    from functools import reduce

    h = to_dense(lattice.build_tfim(lattice.TfimSpec(m, theta))).matrix
    w, v = np.linalg.eigh(h)
    deg = np.abs(w - w[0]) < 1e-9
    sub = v[:, deg]
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)

    def op(d):
        return reduce(np.kron, [d.get(i, eye) for i in range(m)])

    parity = op({i: x for i in range(m)})
    if sub.shape[1] > 1:
        _, pv = np.linalg.eigh(sub.T @ parity @ sub)
        psi = sub @ pv[:, -1]
    else:
        psi = sub[:, 0]
    return (w[0], psi @ op({0: x}) @ psi, psi @ op({0: z, 1: z}) @ psi, psi @ parity @ psi)


def _check_fermion_oracle(m_max: int, grid):
    dev = 0.0
    for m in range(2, m_max + 1):
        for t in grid:
            e, mx, czz, st = _ed_tfim(m, t)
            gs = fermions.solve_ground_state(lattice.TfimSpec(m, t))
            fx, fz = fermions.observables(gs.correlation)
            fs = fermions.string_expectation(gs.correlation)
            dev = max(dev, abs(e - gs.energy), abs(mx - fx), abs(czz - fz), abs(st - fs))
    return dev <= 1e-8, f"M=2..{m_max}, max deviation {dev:.2e}"


def cmd_verify(args) -> int:
    full = args.level == "full"
    start = time.perf_counter()
    n_grid = 16 if full else 8
    grid = np.linspace(0.0, math.pi / 2, n_grid)
    grid64 = np.linspace(0.0, math.pi / 2, 64)
    suite = _Suite()
    suite.check("projector-probability-identity", lambda: _check_identity(grid64 if full else grid))
    suite.check("projector-site-choices", _check_variants)
    suite.check("rho134-closed-form", lambda: _check_rho(grid[1:-1]))
    suite.check("table1-rows", lambda: _check_table1(grid))
    suite.check("two-party-closed-form", lambda: _check_two_party(grid64))
    suite.check("process-matrix-validity", lambda: _check_w_valid(np.linspace(0, 2 * math.pi, 32, endpoint=False)))
    suite.check("classical-bounds", _check_bounds)
    suite.check("cz-split", lambda: _check_split((4, 6, 8) if full else (4, 6), grid[:4]))
    suite.check("spectrum-mirror", lambda: _check_spectrum_mirror(grid))
    suite.check("fermion-vs-dense", lambda: _check_fermion_oracle(10 if full else 6, grid))
    elapsed = time.perf_counter() - start
    n_pass = sum(ok for _, ok, _ in suite.results)
    print(f"{n_pass}/{len(suite.results)} checks passed in {elapsed:.1f} s")
    return EXIT_OK if suite.passed else EXIT_FAIL


# ---------------------------------------------------------------- classify


def cmd_classify(args) -> int:
    grid = correspondence.default_classification_grid(args.steps)
    rep = correspondence.classify_eigenstates(grid)
    energies = eigensolve(lattice.build_game_hamiltonian(math.pi / 4)).eigenvalues
    lines = ["index,energy_at_quarter_pi,max_k_avg,theta_at_max,max_k_avg_solver_basis,flagged"]
    for k in range(rep.sup_k_avg.size):
        lines.append(
            f"{k},{energies[k]:.15g},{rep.sup_k_avg[k]:.15g},{rep.argmax_theta[k]:.15g},"
            f"{rep.basis_k_avg[k]:.15g},{int(rep.flagged[k])}"
        )
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(
        f"flagged {len(rep.flagged_indices)} of {rep.sup_k_avg.size}: {rep.flagged_indices}; {rep.note}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------- game


def _chain_functions(n_sites: int, theta: float) -> tuple[float, float]:
    gs = fermions.solve_ground_state(lattice.TfimSpec(n_sites // 2, theta))
    m_x, c_zz = fermions.observables(gs.correlation)
    return c_zz, m_x


def cmd_game(args) -> int:
    theta = _angle(args, "theta", math.pi / 4)
    n = args.parties
    if 2 * n > dense_cap():
        raise CapacityError(f"{n} parties need {2 * n} qubits, above the dense cap of {dense_cap()}")
    if n == 2:
        w = game.build_w_opt(theta)
        outcome = game.two_party_game(theta)
        f0, f1 = math.cos(theta), math.sin(theta)
    else:
        if args.from_chain is not None:
            f0, f1 = _chain_functions(args.from_chain, theta)
        else:
            f0, f1 = math.cos(theta), math.sin(theta)
        f0 = args.f0 if args.f0 is not None else f0
        f1 = args.f1 if args.f1 is not None else f1
        w = game.build_w_general(n, f0, f1)
        outcome = game.multi_party_game(n, f0, f1, convention=args.convention)
    bound = game.classical_bound(n)
    rep = game.validate_process(w)
    print(f"parties      {n}")
    print(f"theta        {theta:.10f}")
    print(f"f0, f1       {f0:.10f}, {f1:.10f}")
    print(f"P_left       {outcome.p_left:.10f}")
    print(f"P_right      {outcome.p_right:.10f}")
    print(f"P_total      {outcome.p_total:.10f}")
    print(f"bound        {float(bound[2]):.10f} (left {bound[0]}, right {bound[1]})")
    print(f"verdict      {'VIOLATION' if outcome.violates(float(bound[2])) else 'no violation'}")
    print(
        f"validity     hermiticity {rep.hermiticity_residual:.2e}, trace {rep.trace:.10g}, "
        f"min eigenvalue {rep.min_eigenvalue:.3e} ({'valid' if rep.valid else 'INVALID'})"
    )
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_angle(p, name: str, help_text: str):
    g = p.add_mutually_exclusive_group()
    flag = name.replace("_", "-")
    g.add_argument(f"--{flag}", dest=name, type=float, help=f"{help_text} in radians")
    g.add_argument(f"--{flag}-over-pi", dest=f"{name}_over_pi", type=float, help=f"{help_text} as a multiple of pi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isingcausal",
        description="Ising-cluster ring observables and causal-order game probabilities.",
        epilog="The DENSE_CAP environment variable sets the largest dense register (default 12 qubits).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep the angle and emit records")
    p.add_argument("--n", type=int, required=True, help="ring size N (even, >= 4)")
    _add_angle(p, "theta_min", "lower angle")
    _add_angle(p, "theta_max", "upper angle")
    p.add_argument("--steps", type=int, default=65)
    p.add_argument("--backend", choices=sweep.BACKENDS, default="auto")
    p.add_argument("--format", choices=sweep.FORMATS, default="csv")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant checks")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="classify the 16 four-site eigenstates")
    p.add_argument("--steps", type=int, default=65)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("game", help="evaluate the causal-order game at one angle")
    p.add_argument("--parties", type=int, default=2)
    _add_angle(p, "theta", "angle")
    p.add_argument("--f0", type=float, help="override the channel weight")
    p.add_argument("--f1", type=float, help="override the memory weight")
    p.add_argument("--from-chain", type=int, metavar="N", help="take f0, f1 from the N-site ring ground state")
    p.add_argument("--convention", choices=("aligned", "marginal"), default="aligned")
    p.set_defaults(func=cmd_game)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
