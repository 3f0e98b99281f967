"""Compare the compiled and pure-Python Pauli kernels.

Run with ``python benchmarks/bench_kernels.py [--qubits 10] [--repeat 5]``.
"""

import argparse
import importlib
import timeit

import numpy as np

from isingcausal.kernel import OperatorExpr
from isingcausal.lattice import ChainSpec, build_hamiltonian


def _backends():
    out = {"python": importlib.import_module("isingcausal._kernels._pauli_py")}
    try:
        out["compiled"] = importlib.import_module("isingcausal._kernels._pauli_ext")
    except ImportError:
        pass
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    expr: OperatorExpr = build_hamiltonian(ChainSpec(args.qubits, 0.7))
    x, z, ny, c = expr.kernel_arrays()
    n = expr.register_size
    rng = np.random.default_rng(0)
    state = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)

    timings = {}
    results = {}
    for name, mod in _backends().items():
        dense = timeit.repeat(lambda: mod.pauli_dense(x, z, ny, c, n, True), number=1, repeat=args.repeat)
        apply = timeit.repeat(lambda: mod.pauli_apply(x, z, ny, c, state), number=1, repeat=args.repeat)
        timings[name] = (min(dense), min(apply))
        results[name] = (mod.pauli_dense(x, z, ny, c, n, True), mod.pauli_apply(x, z, ny, c, state))

    print(f"{n}-qubit ring Hamiltonian, {len(expr)} Pauli terms, best of {args.repeat}")
    print(f"{'backend':<10}{'dense (ms)':>12}{'apply (ms)':>12}")
    for name, (d, a) in timings.items():
        print(f"{name:<10}{1e3 * d:>12.3f}{1e3 * a:>12.3f}")
    if "compiled" in timings:
        py, cc = timings["python"], timings["compiled"]
        print(f"speed-up   {py[0] / cc[0]:>11.1f}x{py[1] / cc[1]:>11.1f}x")
        dev = max(
            np.max(np.abs(results["python"][0] - results["compiled"][0])),
            np.max(np.abs(results["python"][1] - results["compiled"][1])),
        )
        print(f"max backend difference {dev:.1e}")


if __name__ == "__main__":
    main()
