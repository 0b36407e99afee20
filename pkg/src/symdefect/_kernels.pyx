# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assembly of the real linear system (see ``_kernels_py`` for the
reference implementation and the equation layout)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def assemble_system(
    const double complex[:, ::1] U,
    const long long[::1] rows_j,
    const long long[::1] rows_k,
    const long long[:, ::1] col,
    const double[:, ::1] sgn,
    Py_ssize_t ncols,
):
    cdef Py_ssize_t P = rows_j.shape[0]
    cdef Py_ssize_t N = U.shape[0]
    out_arr = np.zeros((2 * P, ncols), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t p, l, j, k, c
    cdef double complex w
    cdef double s
    with nogil:
        for p in range(P):
            j = rows_j[p]
            k = rows_k[p]
            for l in range(N):
                w = U[k, l] * U[l, j]
                if w.real == 0.0 and w.imag == 0.0:
                    continue
                c = col[k, l]
                if c >= 0:
                    s = sgn[k, l]
                    out[2 * p, c] += s * w.real
                    out[2 * p + 1, c] += s * w.imag
                c = col[l, j]
                if c >= 0:
                    s = sgn[l, j]
                    out[2 * p, c] += s * w.real
                    out[2 * p + 1, c] += s * w.imag
    return out_arr
