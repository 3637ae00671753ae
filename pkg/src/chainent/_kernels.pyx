# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for nearest-neighbour two-qubit operators on state vectors.

Qubit ``q`` of an ``n``-qubit register occupies bit ``n - 1 - q`` of the
basis index, so a bond on sites ``(s, s + 1)`` touches the four amplitudes
``base + k * stride`` with ``stride = 2**(n - 2 - s)`` and ``k = 2*b_s + b_{s+1}``.
"""

import numpy as np

ctypedef double complex cplx


cdef inline void _gate_on_site(cplx* psi, const cplx* g, Py_ssize_t s, int n) noexcept nogil:
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n - 2 - s)
    cdef Py_ssize_t nhi = (<Py_ssize_t>1) << s
    cdef Py_ssize_t hi, lo, base
    cdef cplx a0, a1, a2, a3
    for hi in range(nhi):
        base = hi * 4 * stride
        for lo in range(stride):
            a0 = psi[base + lo]
            a1 = psi[base + lo + stride]
            a2 = psi[base + lo + 2 * stride]
            a3 = psi[base + lo + 3 * stride]
            psi[base + lo] = g[0] * a0 + g[1] * a1 + g[2] * a2 + g[3] * a3
            psi[base + lo + stride] = g[4] * a0 + g[5] * a1 + g[6] * a2 + g[7] * a3
            psi[base + lo + 2 * stride] = g[8] * a0 + g[9] * a1 + g[10] * a2 + g[11] * a3
            psi[base + lo + 3 * stride] = g[12] * a0 + g[13] * a1 + g[14] * a2 + g[15] * a3


cdef inline void _bond_accumulate(const cplx* psi, cplx* out, const cplx* h, Py_ssize_t s, int n) noexcept nogil:
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n - 2 - s)
    cdef Py_ssize_t nhi = (<Py_ssize_t>1) << s
    cdef Py_ssize_t hi, lo, base
    cdef cplx a0, a1, a2, a3
    for hi in range(nhi):
        base = hi * 4 * stride
        for lo in range(stride):
            a0 = psi[base + lo]
            a1 = psi[base + lo + stride]
            a2 = psi[base + lo + 2 * stride]
            a3 = psi[base + lo + 3 * stride]
            out[base + lo] += h[0] * a0 + h[1] * a1 + h[2] * a2 + h[3] * a3
            out[base + lo + stride] += h[4] * a0 + h[5] * a1 + h[6] * a2 + h[7] * a3
            out[base + lo + 2 * stride] += h[8] * a0 + h[9] * a1 + h[10] * a2 + h[11] * a3
            out[base + lo + 3 * stride] += h[12] * a0 + h[13] * a1 + h[14] * a2 + h[15] * a3


def apply_gates(cplx[::1] psi, const cplx[:, :, ::1] gates, const long[::1] sites, int n):
    """Apply ``gates[k]`` on sites ``(sites[k], sites[k] + 1)`` in order, in place."""
    cdef Py_ssize_t k, m = gates.shape[0]
    if psi.shape[0] != (<Py_ssize_t>1) << n:
        raise ValueError("state length does not match qubit count")
    for k in range(m):
        if sites[k] < 0 or sites[k] > n - 2:
            raise ValueError(f"bond site {sites[k]} out of range for n={n}")
    with nogil:
        for k in range(m):
            _gate_on_site(&psi[0], &gates[k, 0, 0], sites[k], n)


def apply_bonds(const cplx[::1] psi, const cplx[:, :, ::1] mats, const long[::1] sites, int n, cplx[::1] out):
    """Write ``sum_k mats[k] psi`` into ``out`` (bond ``k`` acts on ``sites[k], sites[k] + 1``)."""
    cdef Py_ssize_t k, i, m = mats.shape[0]
    cdef Py_ssize_t dim = psi.shape[0]
    if dim != (<Py_ssize_t>1) << n or out.shape[0] != dim:
        raise ValueError("state length does not match qubit count")
    for k in range(m):
        if sites[k] < 0 or sites[k] > n - 2:
            raise ValueError(f"bond site {sites[k]} out of range for n={n}")
    with nogil:
        for i in range(dim):
            out[i] = 0
        for k in range(m):
            _bond_accumulate(&psi[0], &out[0], &mats[k, 0, 0], sites[k], n)
