# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Pauli-sum kernels; same contract as ``_pauli_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline int _parity(unsigned long long v) nogil:
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return <int>(v & 1)


cdef double complex _unit(long ny):
    cdef long r = ny % 4
    if r < 0:
        r += 4
    if r == 0:
        return 1.0
    if r == 1:
        return 1j
    if r == 2:
        return -1.0
    return -1j


def pauli_dense(xmask, zmask, ny, coeffs, int n_qubits, bint real):
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_qubits
    cdef const cnp.int64_t[:] xs = np.ascontiguousarray(xmask, dtype=np.int64)
    cdef const cnp.int64_t[:] zs = np.ascontiguousarray(zmask, dtype=np.int64)
    cdef const cnp.int64_t[:] ys = np.ascontiguousarray(ny, dtype=np.int64)
    cdef const double[:] cs = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t t, b, nterms = xs.shape[0]
    cdef unsigned long long x, z
    cdef double complex w
    cdef double wr
    cdef double[:, :] outr
    cdef double complex[:, :] outc
    if real:
        out = np.zeros((dim, dim), dtype=np.float64)
        outr = out
        for t in range(nterms):
            x = <unsigned long long>xs[t]
            z = <unsigned long long>zs[t]
            wr = (cs[t] * _unit(ys[t])).real
            with nogil:
                for b in range(dim):
                    if _parity(<unsigned long long>b & z):
                        outr[<Py_ssize_t>(<unsigned long long>b ^ x), b] -= wr
                    else:
                        outr[<Py_ssize_t>(<unsigned long long>b ^ x), b] += wr
    else:
        out = np.zeros((dim, dim), dtype=np.complex128)
        outc = out
        for t in range(nterms):
            x = <unsigned long long>xs[t]
            z = <unsigned long long>zs[t]
            w = cs[t] * _unit(ys[t])
            with nogil:
                for b in range(dim):
                    if _parity(<unsigned long long>b & z):
                        outc[<Py_ssize_t>(<unsigned long long>b ^ x), b] -= w
                    else:
                        outc[<Py_ssize_t>(<unsigned long long>b ^ x), b] += w
    return out


def pauli_apply(xmask, zmask, ny, coeffs, state):
    cdef const double complex[:] psi = np.ascontiguousarray(state, dtype=np.complex128)
    cdef Py_ssize_t dim = psi.shape[0]
    cdef const cnp.int64_t[:] xs = np.ascontiguousarray(xmask, dtype=np.int64)
    cdef const cnp.int64_t[:] zs = np.ascontiguousarray(zmask, dtype=np.int64)
    cdef const cnp.int64_t[:] ys = np.ascontiguousarray(ny, dtype=np.int64)
    cdef const double[:] cs = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t t, b, nterms = xs.shape[0]
    cdef unsigned long long x, z
    cdef double complex w
    out = np.zeros(dim, dtype=np.complex128)
    cdef double complex[:] res = out
    for t in range(nterms):
        x = <unsigned long long>xs[t]
        z = <unsigned long long>zs[t]
        w = cs[t] * _unit(ys[t])
        with nogil:
            for b in range(dim):
                if _parity(<unsigned long long>b & z):
                    res[<Py_ssize_t>(<unsigned long long>b ^ x)] -= w * psi[b]
                else:
                    res[<Py_ssize_t>(<unsigned long long>b ^ x)] += w * psi[b]
    return out
