# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in :mod:`purity_witness._pykernels`."""

import numpy as np


def partial_trace(const double complex[:, ::1] rho, Py_ssize_t dim_s,
                  Py_ssize_t dim_e, str trace_out):
    cdef Py_ssize_t a, b, j
    cdef double complex acc
    cdef double complex[:, ::1] out_v
    if trace_out == "E":
        out = np.empty((dim_s, dim_s), dtype=np.complex128)
        out_v = out
        for a in range(dim_s):
            for b in range(dim_s):
                acc = 0
                for j in range(dim_e):
                    acc = acc + rho[a * dim_e + j, b * dim_e + j]
                out_v[a, b] = acc
    else:
        out = np.empty((dim_e, dim_e), dtype=np.complex128)
        out_v = out
        for a in range(dim_e):
            for b in range(dim_e):
                acc = 0
                for j in range(dim_s):
                    acc = acc + rho[j * dim_e + a, j * dim_e + b]
                out_v[a, b] = acc
    return out


def purity_rate_trace(const double complex[:, ::1] rho, const double complex[:, ::1] h,
                      Py_ssize_t dim_s, Py_ssize_t dim_e):
    cdef Py_ssize_t dim = dim_s * dim_e
    cdef Py_ssize_t a, b, j, c, row, col
    cdef double complex acc, rs, total = 0
    for a in range(dim_s):
        for b in range(dim_s):
            # rho_S[b, a]
            rs = 0
            for j in range(dim_e):
                rs = rs + rho[b * dim_e + j, a * dim_e + j]
            if rs == 0:
                continue
            # (Tr_E [H, rho])[a, b]
            acc = 0
            for j in range(dim_e):
                row = a * dim_e + j
                col = b * dim_e + j
                for c in range(dim):
                    acc = acc + h[row, c] * rho[c, col] - rho[row, c] * h[c, col]
            total = total + rs * acc
    return complex(total)
