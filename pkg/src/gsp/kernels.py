"""Hot loops behind the bound computations.

Every kernel exists twice: an explicit-loop version compiled with numba and a
vectorized numpy version.  The module-level names (``assemble_L`` etc.) are
bound to one or the other at import time, see :mod:`gsp._accel`.  Both
variants are importable under their suffixed names so tests and the
benchmark can compare them directly.

All indices are 0-based.  ``table`` is the ``n x n`` slvec index table from
:func:`gsp.matrixkit.sl_table` (``-1`` off the strict lower part).
"""
import numpy as np

from ._accel import USE_NUMBA, jit
from .matrixkit import nu_of, sl_pairs, sl_table

# ------------------------------------------------------------------- loops


@jit
def _assemble_L_loops(T, R, table):
    n = T.shape[0]
    nu = n * (n - 1) // 2
    L = np.zeros((2 * nu, 2 * nu), dtype=np.complex128)
    for j in range(n):
        for i in range(j + 1, n):
            l = table[i, j]
            # x-part: -sum_{k<=j} t_kj x_(i,k)
            for k in range(j + 1):
                c = table[i, k]
                L[l, c] -= T[k, j]
                L[nu + l, c] -= R[k, j]
            # y-part: sum_{k>=i} t_ik y_(k,j)
            for k in range(i, n):
                c = nu + table[k, j]
                L[l, c] += T[i, k]
                L[nu + l, c] += R[i, k]
    return L


@jit
def _assemble_E_loops(T, R, table):
    n = T.shape[0]
    nu = n * (n - 1) // 2
    E = np.zeros((2 * n, 2 * nu), dtype=np.complex128)
    for i in range(n):
        for k in range(i):
            c = table[i, k]
            E[i, c] = -T[k, i]
            E[n + i, c] = -R[k, i]
        for k in range(i + 1, n):
            c = nu + table[k, i]
            E[i, c] = T[i, k]
            E[n + i, c] = R[i, k]
    return E


@jit
def _second_order_xy_loops(absT, absR, TA, TB, W, K):
    n = W.shape[0]
    nu = n * (n - 1) // 2
    dx = np.zeros(nu)
    dy = np.zeros(nu)
    l = 0
    for j in range(n - 1):
        for i in range(j + 1, n):
            sx = 0.0
            sy = 0.0
            for k in range(j + 1):
                g = 0.0
                for m in range(n):
                    g += W[m, i] * W[m, k]
                sx += absT[k, j] * g
                sy += absR[k, j] * g
            qa = 0.0
            qb = 0.0
            for a in range(n):
                wa = W[a, i]
                if wa == 0.0:
                    continue
                ra = 0.0
                rb = 0.0
                for b in range(n):
                    ra += TA[a, b] * K[b, j]
                    rb += TB[a, b] * K[b, j]
                qa += wa * ra
                qb += wa * rb
            dx[l] = sx + qa
            dy[l] = sy + qb
            l += 1
    return dx, dy


@jit
def _diag_second_order_loops(absT, absR, TA, TB, W, K):
    n = W.shape[0]
    ddt = np.zeros(n)
    ddr = np.zeros(n)
    for i in range(n):
        st = 0.0
        sr = 0.0
        for k in range(i + 1):
            g = 0.0
            for m in range(n):
                g += W[m, i] * W[m, k]
            st += absT[k, i] * g
            sr += absR[k, i] * g
        qa = 0.0
        qb = 0.0
        for a in range(n):
            ra = 0.0
            rb = 0.0
            for b in range(n):
                ra += TA[a, b] * K[b, i]
                rb += TB[a, b] * K[b, i]
            qa += W[a, i] * ra
            qb += W[a, i] * rb
        ddt[i] = st + qa
        ddr[i] = sr + qb
    return ddt, ddr


@jit
def _propagate_columns_loops(W1, W2):
    # Column sweep with S = I - rows(|dw_1|^T .. |dw_{i-1}|^T); returns the
    # new column bounds and the smallest pivot met in the LU solves.
    n = W1.shape[0]
    W = np.zeros((n, n))
    for r in range(n):
        W[r, 0] = W1[r, 0] + W2[r, 0]
    S = np.eye(n)
    min_pivot = np.inf
    for i in range(1, n):
        for c in range(n):
            S[i - 1, c] -= W[c, i - 1]
        rhs = np.empty(n)
        for r in range(n):
            rhs[r] = W1[r, i] + W2[r, i]
        # Gaussian elimination with partial pivoting on a copy of S
        M = S.copy()
        for c in range(n):
            p = c
            best = abs(M[c, c])
            for r in range(c + 1, n):
                if abs(M[r, c]) > best:
                    best = abs(M[r, c])
                    p = r
            if best < min_pivot:
                min_pivot = best
            if best == 0.0:
                return W, 0.0
            if p != c:
                for cc in range(n):
                    tmp = M[c, cc]
                    M[c, cc] = M[p, cc]
                    M[p, cc] = tmp
                tmp = rhs[c]
                rhs[c] = rhs[p]
                rhs[p] = tmp
            for r in range(c + 1, n):
                f = M[r, c] / M[c, c]
                if f != 0.0:
                    for cc in range(c, n):
                        M[r, cc] -= f * M[c, cc]
                    rhs[r] -= f * rhs[c]
        for c in range(n - 1, -1, -1):
            s = rhs[c]
            for cc in range(c + 1, n):
                s -= M[c, cc] * rhs[cc]
            rhs[c] = s / M[c, c]
        for r in range(n):
            W[r, i] = rhs[r]
    return W, min_pivot


# ------------------------------------------------------------------- numpy


def _assemble_L_numpy(T, R, table):
    n = T.shape[0]
    nu = nu_of(n)
    L = np.zeros((2 * nu, 2 * nu), dtype=np.complex128)
    if nu == 0:
        return L
    pairs = sl_pairs(n)
    I, J = pairs[:, 0], pairs[:, 1]
    rows = np.arange(nu)
    k = np.arange(n)
    # x-part: columns table[i, k] for k <= j
    mx = k[None, :] <= J[:, None]
    rr, kk = np.nonzero(mx)
    cx = table[I[rr], kk]
    L[rows[rr], cx] = -T[kk, J[rr]]
    L[nu + rows[rr], cx] = -R[kk, J[rr]]
    # y-part: columns nu + table[k, j] for k >= i
    my = k[None, :] >= I[:, None]
    rr, kk = np.nonzero(my)
    cy = nu + table[kk, J[rr]]
    L[rows[rr], cy] = T[I[rr], kk]
    L[nu + rows[rr], cy] = R[I[rr], kk]
    return L


def _assemble_E_numpy(T, R, table):
    n = T.shape[0]
    nu = nu_of(n)
    E = np.zeros((2 * n, 2 * nu), dtype=np.complex128)
    if nu == 0:
        return E
    ii, kk = np.tril_indices(n, -1)  # k < i
    cx = table[ii, kk]
    E[ii, cx] = -T[kk, ii]
    E[n + ii, cx] = -R[kk, ii]
    kk, ii = np.tril_indices(n, -1)  # k > i
    cy = nu + table[kk, ii]
    E[ii, cy] = T[ii, kk]
    E[n + ii, cy] = R[ii, kk]
    return E


def _second_order_xy_numpy(absT, absR, TA, TB, W, K):
    n = W.shape[0]
    G = W.T @ W
    pairs = sl_pairs(n)
    I, J = pairs[:, 0], pairs[:, 1]
    # sum_{k<=j} |t_kj| w_i.w_k is (G triu|T|)_{ij}
    cross_a = W.T @ TA @ K
    cross_b = W.T @ TB @ K
    dx = (G @ np.triu(absT) + cross_a)[I, J]
    dy = (G @ np.triu(absR) + cross_b)[I, J]
    return dx, dy


def _diag_second_order_numpy(absT, absR, TA, TB, W, K):
    G = W.T @ W
    ddt = np.diag(G @ np.triu(absT)) + np.einsum("ai,ab,bi->i", W, TA, K)
    ddr = np.diag(G @ np.triu(absR)) + np.einsum("ai,ab,bi->i", W, TB, K)
    return ddt, ddr


def _propagate_columns_numpy(W1, W2):
    import scipy.linalg as sla

    n = W1.shape[0]
    W = np.zeros((n, n))
    W[:, 0] = W1[:, 0] + W2[:, 0]
    S = np.eye(n)
    min_pivot = np.inf
    for i in range(1, n):
        S[i - 1, :] -= W[:, i - 1]
        lu, piv = sla.lu_factor(S, check_finite=False)
        pivots = np.abs(np.diag(lu))
        min_pivot = min(min_pivot, float(pivots.min()))
        if pivots.min() == 0.0:
            return W, 0.0
        W[:, i] = sla.lu_solve((lu, piv), W1[:, i] + W2[:, i], check_finite=False)
    return W, min_pivot


# ----------------------------------------------------------------- dispatch

if USE_NUMBA:
    _assemble_L = _assemble_L_loops
    _assemble_E = _assemble_E_loops
    second_order_xy = _second_order_xy_loops
    diag_second_order = _diag_second_order_loops
    _propagate = _propagate_columns_loops
else:
    _assemble_L = _assemble_L_numpy
    _assemble_E = _assemble_E_numpy
    second_order_xy = _second_order_xy_numpy
    diag_second_order = _diag_second_order_numpy
    _propagate = _propagate_columns_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"


def assemble_L(T, R):
    """``2nu x 2nu`` coefficient matrix of the first-order system in (x, y)."""
    T = np.ascontiguousarray(T, dtype=np.complex128)
    R = np.ascontiguousarray(R, dtype=np.complex128)
    return _assemble_L(T, R, sl_table(T.shape[0]))


def assemble_E(T, R):
    """``2n x 2nu`` map from (x, y) to the first-order change of diag(T), diag(R)."""
    T = np.ascontiguousarray(T, dtype=np.complex128)
    R = np.ascontiguousarray(R, dtype=np.complex128)
    return _assemble_E(T, R, sl_table(T.shape[0]))


def propagate_columns(W1, W2):
    """Column sweep of the nonlinear update: ``W[:, i] = S_i^{-1} (W1 + W2)[:, i]``.

    Returns ``(W, min_pivot)``; ``min_pivot`` is the smallest LU pivot met.
    """
    W1 = np.ascontiguousarray(W1, dtype=np.float64)
    W2 = np.ascontiguousarray(W2, dtype=np.float64)
    return _propagate(W1, W2)
