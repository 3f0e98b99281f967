"""Shared oracles built directly from ``np.kron``, independent of the package kernels."""

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2)
X = np.array([[0.0, 1.0], [1.0, 0.0]])
Y = np.array([[0.0, -1j], [1j, 0.0]])
Z = np.diag([1.0, -1.0])
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_op(n, factors):
    """Dense operator with ``factors = {site: "X"|"Y"|"Z"}`` and identity elsewhere."""
    return reduce(np.kron, [PAULI[factors.get(i, "I")] for i in range(n)])


def game_hamiltonian_oracle(theta):
    c, s = np.cos(theta), np.sin(theta)
    h = -2 * c * (kron_op(4, {0: "Z", 2: "Z"}) + kron_op(4, {1: "Z", 3: "Z"}))
    for i in range(4):
        h = h - s * kron_op(4, {i: "Z", (i + 1) % 4: "X", (i + 2) % 4: "Z"})
    return h


def chain_hamiltonian_oracle(n, theta):
    c, s = np.cos(theta), np.sin(theta)
    h = np.zeros((2**n, 2**n))
    for i in range(n):
        h = h - c * kron_op(n, {i: "Z", (i + 2) % n: "Z"})
        h = h - s * kron_op(n, {i: "Z", (i + 1) % n: "X", (i + 2) % n: "Z"})
    return h


def tfim_oracle(m, theta):
    c, s = np.cos(theta), np.sin(theta)
    h = np.zeros((2**m, 2**m))
    for i in range(m):
        # at m = 2 both periodic bonds land on the same pair
        h = h - c * kron_op(m, {i: "Z", (i + 1) % m: "Z"})
        h = h - s * kron_op(m, {i: "X"})
    return h


def tfim_ground_oracle(m, theta):
    """ED ground state; a degenerate level is resolved toward parity ``+1``."""
    w, v = np.linalg.eigh(tfim_oracle(m, theta))
    sub = v[:, np.abs(w - w[0]) < 1e-9]
    parity = kron_op(m, {i: "X" for i in range(m)})
    if sub.shape[1] > 1:
        _, pv = np.linalg.eigh(sub.T @ parity @ sub)
        psi = sub @ pv[:, -1]
    else:
        psi = sub[:, 0]
    return w[0], psi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
