"""Compiled inner loops for the Jacobi-matrix code.

Both loops are O(N) per evaluation and run millions of steps, which is
why they live here instead of in plain Python.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def det_recurrence(lam, w2, rho, out):
    """Backward recurrence g_j = (1 - rho lam_j) g_{j+1} - rho^2 w2_j g_{j+2}.

    The unknown tail values g_N and g_{N+1} are kept symbolic: every g_j is
    returned as a pair (alpha_j, beta_j) with g_j = alpha_j g_N + beta_j g_{N+1}.
    Derivatives with respect to rho are propagated alongside.

    ``out`` (zero-filled, shape (keep, 4), dtype of rho) receives alpha,
    beta, d alpha, d beta for j = 0..keep-1; keep may not exceed N + 2.
    """
    n = lam.shape[0]
    keep = out.shape[0]
    # state for j+1 and j+2
    a1 = 1.0 + 0.0 * rho
    b1 = 0.0 * rho
    da1 = 0.0 * rho
    db1 = 0.0 * rho
    a2 = 0.0 * rho
    b2 = 1.0 + 0.0 * rho
    da2 = 0.0 * rho
    db2 = 0.0 * rho
    rho2 = rho * rho
    if n < keep:
        out[n, 0] = 1.0
    if n + 1 < keep:
        out[n + 1, 1] = 1.0
    for j in range(n - 1, -1, -1):
        d = 1.0 - rho * lam[j]
        c = rho2 * w2[j]
        dc = 2.0 * rho * w2[j]
        a = d * a1 - c * a2
        b = d * b1 - c * b2
        da = -lam[j] * a1 + d * da1 - dc * a2 - c * da2
        db = -lam[j] * b1 + d * db1 - dc * b2 - c * db2
        if j < keep:
            out[j, 0] = a
            out[j, 1] = b
            out[j, 2] = da
            out[j, 3] = db
        a2, b2, da2, db2 = a1, b1, da1, db1
        a1, b1, da1, db1 = a, b, da, db


@njit(cache=True)
def sturm_count(diag, off2, x):
    """Number of eigenvalues strictly below x (LDL^T inertia count)."""
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if q < 0.0:
        count += 1
    tiny = 1e-300
    for i in range(1, n):
        if q == 0.0:
            q = tiny
        q = diag[i] - x - off2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def bisect_eigenvalues(diag, off2, indices, lo, hi, tol):
    """Eigenvalues with the given ascending indices, by Sturm bisection.

    [lo, hi] must contain the whole spectrum (e.g. Gershgorin bounds).
    """
    m = indices.shape[0]
    out = np.empty(m)
    for t in range(m):
        k = indices[t]
        a = lo
        b = hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if sturm_count(diag, off2, mid) <= k:
                a = mid
            else:
                b = mid
        out[t] = 0.5 * (a + b)
    return out
