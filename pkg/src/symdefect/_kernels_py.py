"""Pure-NumPy assembly of the real linear system.

Row pair ``(2p, 2p+1)`` holds the real and imaginary parts of the entry
``(k, j)`` of ``(U o R) U + U (U o R)`` for the ``p``-th pair ``j < k``:

    sum_l U[k, l] U[l, j] (R[k, l] + R[l, j]).

``col[a, b]`` is the column of the variable ``R[min(a,b), max(a,b)]`` (or -1
when the pair is not a variable) and ``sgn[a, b]`` is ``+1`` for ``a < b``
and ``-1`` otherwise, folding antisymmetry into the coefficients.
"""

import numpy as np


def assemble_system(U, rows_j, rows_k, col, sgn, ncols):
    P = rows_j.shape[0]
    N = U.shape[0]
    out = np.zeros((2 * P, ncols))
    re_rows = 2 * np.arange(P)
    for l in range(N):
        w = U[rows_k, l] * U[l, rows_j]
        # each statement below touches every row at most once, so the
        # fancy-indexed accumulation is exact
        for c, s in ((col[rows_k, l], sgn[rows_k, l]), (col[l, rows_j], sgn[l, rows_j])):
            m = c >= 0
            if not m.any():
                continue
            r, cc, ws = re_rows[m], c[m], s[m] * w[m]
            out[r, cc] += ws.real
            out[r + 1, cc] += ws.imag
    return out
