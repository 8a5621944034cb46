"""Compiled per-stripe coding loops.

Every codec walks the file one stripe at a time and does log/antilog
table arithmetic on scalars, so the work done for a stripe is exactly
the work its algorithm prescribes. Zero coefficients and zero data
symbols short-circuit the multiply, as in a scalar ``gf_mul``.

Log arrays use the field's sentinel ``zero = 2 * order`` for log(0);
``exp_ext`` maps any index at or above the sentinel to 0.
"""

from __future__ import annotations

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)


@_jit
def vecmat(lg, xt, log_ext, exp_ext, zero):
    """``y = x^T G`` for every stripe.

    ``lg`` is ``log(G)`` with shape ``(b, a)``; ``xt`` is ``(stripes, b)``,
    one stripe per row. Returns ``(a, stripes)``.
    """
    S, b = xt.shape
    a = lg.shape[1]
    out = np.empty((a, S), dtype=xt.dtype)
    y = np.empty(a, dtype=xt.dtype)
    for s in range(S):
        y[:] = 0
        for j in range(b):
            lx = log_ext[xt[s, j]]
            if lx == zero:
                continue
            row = lg[j]
            for i in range(a):
                c = row[i]
                if c == zero:
                    continue
                y[i] ^= exp_ext[c + lx]
        out[:, s] = y
    return out


@_jit
def pm_encode(xt, h, lphi, llam, up_r, up_c, log_ext, exp_ext):
    """Product-matrix node rows ``phi_i^T (S1 + lambda_i S2)`` per stripe.

    ``xt`` is ``(stripes, 2h)`` holding the S1 then S2 upper triangles;
    ``lphi`` is ``(nodes, alpha)`` and ``llam`` ``(nodes,)``, both logs.
    Returns ``(nodes, alpha, stripes)``.
    """
    S = xt.shape[0]
    nodes, a = lphi.shape
    out = np.empty((nodes, a, S), dtype=xt.dtype)
    ls2 = np.empty(h, dtype=np.int32)
    lt = np.empty(h, dtype=np.int32)
    y = np.empty(a, dtype=xt.dtype)
    for s in range(S):
        x = xt[s]
        for t in range(h):
            ls2[t] = log_ext[x[h + t]]
        for i in range(nodes):
            ll = llam[i]
            for t in range(h):
                lt[t] = log_ext[x[t] ^ exp_ext[ls2[t] + ll]]
            lp = lphi[i]
            y[:] = 0
            # T = S1 + lambda_i S2 is symmetric: each stored entry feeds
            # output columns c and r
            for t in range(h):
                r = up_r[t]
                c = up_c[t]
                y[c] ^= exp_ext[lt[t] + lp[r]]
                if r != c:
                    y[r] ^= exp_ext[lt[t] + lp[c]]
            out[i, :, s] = y
    return out


@_jit
def pm_decode(yt, lphi, lpair, llam, others, lw, linv_base, up_r, up_c, log_ext, exp_ext, zero):
    """Recover the packed message from k node rows per stripe.

    ``yt`` is ``(stripes, k, alpha)``. ``lphi`` (k, alpha) are the helpers'
    phi rows, ``lpair[i, j]`` is ``log 1/(lambda_i + lambda_j)``, ``others[m]``
    lists the k-1 partners of base node m and ``lw[m]`` is the log of the
    inverse of their stacked phi rows. ``linv_base`` is the log of
    ``Phi_base^-1``. Returns ``(2h, stripes)``.
    """
    S, k, a = yt.shape
    h = up_r.shape[0]
    out = np.empty((2 * h, S), dtype=yt.dtype)
    ly = np.empty((k, a), dtype=np.int32)
    A = np.zeros((k, k), dtype=np.int64)
    lP = np.empty((k, k), dtype=np.int32)
    lQ = np.empty((k, k), dtype=np.int32)
    lR1 = np.empty((a, a), dtype=np.int32)
    lR2 = np.empty((a, a), dtype=np.int32)
    for s in range(S):
        for i in range(k):
            for r in range(a):
                ly[i, r] = log_ext[yt[s, i, r]]
        # A[i, j] = y_i . phi_j = P_ij + lambda_i Q_ij
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                acc = 0
                for r in range(a):
                    acc ^= exp_ext[ly[i, r] + lphi[j, r]]
                A[i, j] = acc
        for i in range(k):
            lP[i, i] = zero
            lQ[i, i] = zero
            for j in range(i + 1, k):
                q = exp_ext[lpair[i, j] + log_ext[A[i, j] ^ A[j, i]]]
                lq = log_ext[q]
                p = A[i, j] ^ exp_ext[llam[i] + lq]
                lp = log_ext[p]
                lP[i, j] = lp
                lP[j, i] = lp
                lQ[i, j] = lq
                lQ[j, i] = lq
        # S phi_m for the first alpha nodes, one alpha x alpha solve each
        for m in range(a):
            w = lw[m]
            om = others[m]
            for c in range(a):
                acc1 = 0
                acc2 = 0
                for t in range(a):
                    wc = w[c, t]
                    acc1 ^= exp_ext[wc + lP[m, om[t]]]
                    acc2 ^= exp_ext[wc + lQ[m, om[t]]]
                lR1[m, c] = log_ext[acc1]
                lR2[m, c] = log_ext[acc2]
        # S = Phi_base^-1 R, upper triangle only
        for t in range(h):
            r = up_r[t]
            c = up_c[t]
            acc1 = 0
            acc2 = 0
            for m in range(a):
                ib = linv_base[r, m]
                acc1 ^= exp_ext[ib + lR1[m, c]]
                acc2 ^= exp_ext[ib + lR2[m, c]]
            out[t, s] = acc1
            out[h + t, s] = acc2
    return out
