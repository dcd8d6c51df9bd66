# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise kernels: fused single-pass loops over lattice points.

Semantics match nseb._kernels._ref exactly; the reductions use compensated
(Kahan) summation so they are at least as accurate as NumPy's pairwise sum.
"""

import numpy as np

from libc.math cimport sqrt

BACKEND = "cython"


def outer_product(a_in, b_in):
    tail = np.shape(a_in)[1:]
    a3 = np.ascontiguousarray(a_in, dtype=np.float64).reshape(3, -1)
    b3 = np.ascontiguousarray(b_in, dtype=np.float64).reshape(3, -1)
    cdef double[:, ::1] a = a3
    cdef double[:, ::1] b = b3
    cdef Py_ssize_t m = a.shape[1]
    out_arr = np.empty((3, 3, m), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t x
    cdef double a0, a1, a2, b0, b1, b2
    for x in range(m):
        a0 = a[0, x]; a1 = a[1, x]; a2 = a[2, x]
        b0 = b[0, x]; b1 = b[1, x]; b2 = b[2, x]
        out[0, 0, x] = a0 * b0
        out[0, 1, x] = a0 * b1
        out[0, 2, x] = a0 * b2
        out[1, 0, x] = a1 * b0
        out[1, 1, x] = a1 * b1
        out[1, 2, x] = a1 * b2
        out[2, 0, x] = a2 * b0
        out[2, 1, x] = a2 * b1
        out[2, 2, x] = a2 * b2
    return out_arr.reshape((3, 3) + tail)


def outer_product_sym(a_in):
    tail = np.shape(a_in)[1:]
    a3 = np.ascontiguousarray(a_in, dtype=np.float64).reshape(3, -1)
    cdef double[:, ::1] a = a3
    cdef Py_ssize_t m = a.shape[1]
    out_arr = np.empty((3, 3, m), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t x
    cdef double a0, a1, a2, v
    for x in range(m):
        a0 = a[0, x]; a1 = a[1, x]; a2 = a[2, x]
        out[0, 0, x] = a0 * a0
        out[1, 1, x] = a1 * a1
        out[2, 2, x] = a2 * a2
        v = a0 * a1
        out[0, 1, x] = v; out[1, 0, x] = v
        v = a0 * a2
        out[0, 2, x] = v; out[2, 0, x] = v
        v = a1 * a2
        out[1, 2, x] = v; out[2, 1, x] = v
    return out_arr.reshape((3, 3) + tail)


def vector_magnitude(a_in):
    tail = np.shape(a_in)[1:]
    a3 = np.ascontiguousarray(a_in, dtype=np.float64).reshape(3, -1)
    cdef double[:, ::1] a = a3
    cdef Py_ssize_t m = a.shape[1]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t x
    cdef double a0, a1, a2
    for x in range(m):
        a0 = a[0, x]; a1 = a[1, x]; a2 = a[2, x]
        out[x] = sqrt(a0 * a0 + a1 * a1 + a2 * a2)
    return out_arr.reshape(tail)


def trace_pair_sum(t_in, g_in):
    t9 = np.ascontiguousarray(t_in, dtype=np.float64).reshape(3, 3, -1)
    g9 = np.ascontiguousarray(g_in, dtype=np.float64).reshape(3, 3, -1)
    cdef double[:, :, ::1] t = t9
    cdef double[:, :, ::1] g = g9
    cdef Py_ssize_t m = t.shape[2]
    cdef Py_ssize_t i, j, x
    cdef double s = 0.0, c = 0.0, y, tt, v
    for i in range(3):
        for j in range(3):
            for x in range(m):
                v = t[i, j, x] * g[j, i, x]
                y = v - c
                tt = s + y
                c = (tt - s) - y
                s = tt
    return s
