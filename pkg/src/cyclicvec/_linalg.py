"""Dense Hermitian positive-definite solves on nested lists of mpmath numbers."""
from __future__ import annotations

from mpmath import mp

from .errors import NotPSD, SolveFailed


def cholesky(M, pivot_tol=0):
    """Lower-triangular L with M = L L^*. Raises NotPSD on a pivot <= pivot_tol."""
    size = len(M)
    L = [[mp.zero] * size for _ in range(size)]
    for j in range(size):
        d = mp.re(M[j][j]) - sum(abs(L[j][k]) ** 2 for k in range(j))
        if d <= pivot_tol:
            raise NotPSD(f"non-positive pivot {mp.nstr(d, 8)} at position {j}")
        ljj = mp.sqrt(d)
        L[j][j] = ljj
        for i in range(j + 1, size):
            s = M[i][j] - sum(L[i][k] * mp.conj(L[j][k]) for k in range(j))
            L[i][j] = s / ljj
    return L


def cholesky_solve(L, b):
    size = len(L)
    y = [mp.zero] * size
    for i in range(size):
        y[i] = (b[i] - sum(L[i][k] * y[k] for k in range(i))) / L[i][i]
    x = [mp.zero] * size
    for i in reversed(range(size)):
        x[i] = (y[i] - sum(mp.conj(L[k][i]) * x[k] for k in range(i + 1, size))) / L[i][i]
    return x


def matvec(M, x):
    return [sum(M[i][k] * x[k] for k in range(len(x))) for i in range(len(M))]


def inf_norm_vec(v):
    return max((abs(t) for t in v), default=mp.zero)


def inf_norm_mat(M):
    return max((sum(abs(t) for t in row) for row in M), default=mp.zero)


def backward_error(M, x, b):
    r = [bi - mi for bi, mi in zip(b, matvec(M, x))]
    denom = inf_norm_mat(M) * inf_norm_vec(x) + inf_norm_vec(b)
    return inf_norm_vec(r) / denom if denom else inf_norm_vec(r)


def hpd_solve(M, b, rel_tol):
    """Cholesky solve with one step of iterative refinement; returns (x, residual)."""
    L = cholesky(M)
    x = cholesky_solve(L, b)
    r = [bi - mi for bi, mi in zip(b, matvec(M, x))]
    dx = cholesky_solve(L, r)
    x = [xi + di for xi, di in zip(x, dx)]
    res = backward_error(M, x, b)
    if res > rel_tol:
        raise SolveFailed(f"relative residual {mp.nstr(res, 5)} exceeds {rel_tol}")
    return x, res


def is_hermitian(M, tol=0):
    size = len(M)
    return all(
        abs(M[i][j] - mp.conj(M[j][i])) <= tol for i in range(size) for j in range(i, size)
    )
