"""Vectorised numpy kernels for Pauli-sum operators.

A Pauli string is encoded by two bit masks over the basis index: ``xmask``
marks sites carrying X or Y, ``zmask`` marks sites carrying Z or Y.  With
``ny`` the number of Y factors the string equals ``i**ny * X^x Z^z``, so

    P |b> = i**ny * (-1)**popcount(b & zmask) |b ^ xmask>.

Site ``q`` of an ``n``-qubit register is bit ``n - 1 - q`` of the index
(the ``np.kron`` ordering).
"""

import numpy as np


def _parity(values):
    v = values.copy()
    shift = 32
    while shift:
        v ^= v >> shift
        shift //= 2
    return (v & 1).astype(np.int8)


def _phases(coeffs, ny):
    return np.asarray(coeffs, dtype=complex) * (1j ** (np.asarray(ny) % 4))


def pauli_dense(xmask, zmask, ny, coeffs, n_qubits, real):
    dim = 1 << n_qubits
    dtype = np.float64 if real else np.complex128
    out = np.zeros((dim, dim), dtype=dtype)
    basis = np.arange(dim, dtype=np.int64)
    weights = _phases(coeffs, ny)
    for x, z, w in zip(xmask, zmask, weights):
        signs = 1 - 2 * _parity(basis & int(z))
        vals = w * signs
        if real:
            vals = vals.real
        out[basis ^ int(x), basis] += vals
    return out


def pauli_apply(xmask, zmask, ny, coeffs, state):
    state = np.asarray(state, dtype=np.complex128)
    dim = state.shape[0]
    basis = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.complex128)
    weights = _phases(coeffs, ny)
    for x, z, w in zip(xmask, zmask, weights):
        signs = 1 - 2 * _parity(basis & int(z))
        out[basis ^ int(x)] += w * signs * state
    return out
