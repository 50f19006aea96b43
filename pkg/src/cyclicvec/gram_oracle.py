"""Gram-matrix route to rho^2(e_k, L_{2n+1}(f)).

This is the cross-check for the K route and deliberately shares none of its
algebra: the moment matrix A[a][b] = sum_s lambda_s^(a+b) |c_s|^2 is solved
with mpmath's LU factorisation, and the determinant variant uses mpmath's
determinant. A is badly conditioned (it is a Hankel moment matrix), so this
route may run at a higher precision, see ``PrecisionConfig.gram_mantissa_bits``.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import SingularGram
from .spectral_core import (
    CoefficientSequence,
    LogSigned,
    PrecisionConfig,
    Spectrum,
    TableCoefficients,
    logsigned_mul,
    summation_range,
)
from .tail_series import gram_moments


@dataclass(frozen=True)
class GramSystem:
    n: int
    A: list  # (2n+1) x (2n+1) nested lists, real symmetric
    moments: list
    moment_bounds: list
    spectrum: Spectrum
    coeffs: CoefficientSequence
    mantissa_bits: int

    @property
    def size(self):
        return 2 * self.n + 1

    def b(self, k: int) -> list:
        """(1, lambda_k, ..., lambda_k^{2n})^T (f, e_k)."""
        lam = self.spectrum.eval(k)
        c = self.coeffs.eval(k)
        return [lam**a * c for a in range(self.size)]

    def nonzero_count(self):
        rng = summation_range(self.spectrum, self.coeffs)
        if rng is None:
            return None
        return sum(1 for s in range(rng[0], rng[1] + 1) if self.coeffs.abs2(s) != 0)


@dataclass(frozen=True)
class GramResult:
    rho2: object
    q: object
    clip: object
    residual: object


def build_gram(spectrum, coeffs, n: int, cfg: PrecisionConfig) -> GramSystem:
    gcfg = cfg.for_gram()
    with gcfg.workprec():
        moments, bounds = gram_moments(spectrum, coeffs, 4 * n, gcfg)
        size = 2 * n + 1
        A = [[moments[a + b] for b in range(size)] for a in range(size)]
    return GramSystem(n, A, moments, bounds, spectrum, coeffs, gcfg.mantissa_bits)


def condition_estimate(A, iterations: int = 10):
    """Ratio of power-iteration estimates of the extreme eigenvalues of A."""
    M = mp.matrix(A)
    size = M.rows
    v = mp.matrix([mp.one] * size)
    big = mp.zero
    for _ in range(iterations):
        w = M * v
        big = mp.norm(w)
        if big == 0:
            return mp.inf
        v = w / big
    v = mp.matrix([mp.one] * size)
    small_inv = mp.zero
    try:
        for _ in range(iterations):
            w = mp.lu_solve(M, v)
            small_inv = mp.norm(w)
            v = w / small_inv
    except ZeroDivisionError:
        return mp.inf
    return big * small_inv


def _singular(gs: GramSystem, msg: str):
    return SingularGram(msg, mp.nstr(condition_estimate(gs.A), 5))


def _check_rank(gs: GramSystem):
    cnt = gs.nonzero_count()
    if cnt is not None and cnt < gs.size:
        raise SingularGram(
            f"only {cnt} nonzero coefficients; Gram matrix of order {gs.size} is singular"
        )


def gram_solve(gs: GramSystem, k: int, cfg: PrecisionConfig) -> GramResult:
    """<A^{-1} b, b> with b = c_k v, v = (lambda_k^a)_a. The scalar c_k is
    factored out, <A^{-1} b, b> = |c_k|^2 <A^{-1} v, v>, so the result does
    not depend on the phases of the coefficients."""
    _check_rank(gs)
    with mp.workprec(gs.mantissa_bits):
        A = mp.matrix(gs.A)
        lam = gs.spectrum.eval(k)
        v = mp.matrix([lam**a for a in range(gs.size)])
        try:
            x = mp.lu_solve(A, v)
        except ZeroDivisionError:
            raise _singular(gs, "LU factorisation of the Gram matrix broke down") from None
        r = A * x - v
        denom = mp.mnorm(A, 1) * mp.norm(x, 1) + mp.norm(v, 1)
        res = mp.norm(r, 1) / denom if denom else mp.norm(r, 1)
        if res > cfg.solve_rel_tol:
            raise _singular(gs, f"Gram solve residual {mp.nstr(res, 5)} above tolerance")
        q = gs.coeffs.abs2(k) * sum(x[a] * v[a] for a in range(gs.size))
        raw = 1 - q
        rho2 = min(max(raw, mp.zero), mp.one)
        return GramResult(rho2, q, rho2 - raw, res)


def rho2_via_gram(gs: GramSystem, k: int, cfg: PrecisionConfig):
    return gram_solve(gs, k, cfg).rho2


def rho2_via_gram_determinant(gs: GramSystem, k: int, cfg: PrecisionConfig):
    """Gamma(e_k, f, ..., A^{2n} f) / Gamma(f, ..., A^{2n} f)."""
    _check_rank(gs)
    with mp.workprec(gs.mantissa_bits):
        b = gs.b(k)
        size = gs.size
        G = mp.matrix(size + 1, size + 1)
        G[0, 0] = 1
        for a in range(size):
            G[0, a + 1] = mp.conj(b[a])
            G[a + 1, 0] = b[a]
            for c in range(size):
                G[a + 1, c + 1] = gs.A[a][c]
        den = mp.det(mp.matrix(gs.A))
        if den == 0:
            raise _singular(gs, "Gram determinant vanishes")
        return mp.re(mp.det(G) / den)


def verify_B_factorization(spectrum, coeffs, n: int, jmax: int, cfg: PrecisionConfig):
    """Max |sum_{|j|<=jmax} B_j B_j^* - A| over entries, where B_j holds
    lambda_m^a c_m for the block of columns m = (2n+1)j - n .. (2n+1)j + n and
    A is the Gram matrix of the coefficients truncated to those blocks."""
    s = 2 * n + 1
    reach = s * jmax + n
    with cfg.workprec():
        trunc = TableCoefficients(
            values=tuple(coeffs.eval(m) for m in range(-reach, reach + 1)), offset=-reach
        )
        total = [[mp.zero] * s for _ in range(s)]
        for j in range(-jmax, jmax + 1):
            cols = range(s * j - n, s * j + n + 1)
            B = [[spectrum.eval(m) ** a * trunc.eval(m) for m in cols] for a in range(s)]
            for a in range(s):
                for b in range(s):
                    total[a][b] += sum(B[a][c] * mp.conj(B[b][c]) for c in range(s))
    gs = build_gram(spectrum, trunc, n, cfg)
    with mp.workprec(max(cfg.mantissa_bits, gs.mantissa_bits)):
        return max(abs(total[a][b] - gs.A[a][b]) for a in range(s) for b in range(s))


def vandermonde_det(nodes) -> LogSigned:
    """prod_{i<j} (x_j - x_i) in log-signed form."""
    xs = [mp.mpf(x) for x in nodes]
    out = LogSigned(1, mp.zero)
    for j in range(len(xs)):
        for i in range(j):
            out = logsigned_mul(out, LogSigned.from_value(xs[j] - xs[i]))
    return out
