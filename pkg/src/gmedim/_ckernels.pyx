# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled criterion kernels; same contract as ``gmedim._pykernels``."""
from libc.math cimport sqrt, hypot


def plan_sums(const double complex[::1] off_vals, const double[::1] diag_vals,
              const long long[::1] p_u, const long long[::1] p_v,
              const long long[::1] d_pos, double neg_tol):
    cdef Py_ssize_t i
    cdef double o_sum = 0.0, p_sum = 0.0, d_sum = 0.0, a, b
    cdef long long nd = diag_vals.shape[0]
    for i in range(off_vals.shape[0]):
        o_sum += hypot(off_vals[i].real, off_vals[i].imag)
    for i in range(p_u.shape[0]):
        if p_u[i] < 0 or p_u[i] >= nd or p_v[i] < 0 or p_v[i] >= nd:
            raise IndexError("diagonal position out of range")
        a = diag_vals[p_u[i]]
        b = diag_vals[p_v[i]]
        if a < -neg_tol:
            return o_sum, 0.0, 0.0, p_u[i]
        if b < -neg_tol:
            return o_sum, 0.0, 0.0, p_v[i]
        if a < 0.0:
            a = 0.0
        if b < 0.0:
            b = 0.0
        p_sum += sqrt(a * b)
    for i in range(d_pos.shape[0]):
        if d_pos[i] < 0 or d_pos[i] >= nd:
            raise IndexError("diagonal position out of range")
        d_sum += diag_vals[d_pos[i]]
    return o_sum, p_sum, d_sum, -1
