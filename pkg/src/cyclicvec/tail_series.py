"""Certified out-of-window tail sums.

Two series are needed: the K-matrix tails

    S_ij = sum_{|s|>n} P(lambda_s)^2 |c_s|^2 / ((lambda_s - lambda_i)(lambda_s - lambda_j))

and the Gram moments sum_s lambda_s^p |c_s|^2. Terms are added in pairs
s = +-m moving outward. After each pair a remainder bound is formed from the
coefficient envelope: with |lambda_s| <= beta|s| + gamma the dropped terms are
majorised by a sequence whose consecutive ratios are bounded by some q < 1, so
the rest of the series is at most (first dropped majorant)/(1 - q).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mpmath import mp

from .errors import DivergentTail, IndexOutOfWindow, ToleranceUnreachable
from .nodal_poly import NodalContext, eval_P, eval_P_integer
from .spectral_core import (
    CoefficientSequence,
    LogSigned,
    PrecisionConfig,
    Spectrum,
    summation_range,
)


@dataclass(frozen=True)
class TailSumResult:
    value: LogSigned
    truncation_bound: object
    terms_used: int
    tail_assumed_zero: bool = False

    @property
    def real(self):
        return self.value.to_value()


def _weight(ctx: NodalContext, coeffs: CoefficientSequence, s: int):
    """P(lambda_s)^2 |c_s|^2 as an mpf (zero when c_s = 0)."""
    a2 = coeffs.abs2(s)
    if a2 == 0:
        return mp.zero
    if ctx.integer_line:
        p = eval_P_integer(ctx.n, s)
    else:
        p = eval_P(ctx, ctx.spectrum.eval(s))
    if p.sign == 0:
        return mp.zero
    return mp.exp(2 * p.logmag) * a2


def _check_certifiable(spectrum: Spectrum, coeffs: CoefficientSequence):
    if spectrum.upper_growth is None:
        raise DivergentTail("spectrum has no growth bound; infinite tail cannot be certified")
    probe = max(coeffs.env_start, 1) + 10**6
    ratio = coeffs.envelope_ratio(probe)
    if coeffs.envelope(probe) is None or ratio is None:
        raise DivergentTail(f"{coeffs.kind} sequence carries no decay envelope")
    if ratio >= 1:
        raise DivergentTail("coefficient envelope does not decay geometrically")


class _Majorant:
    """Bound on sum_{|s|>m} of env(|s|)^2 (beta|s| + g)^power / dmin(m)^2."""

    def __init__(self, spectrum, coeffs, power, shift, node_gap=None):
        beta, gamma = spectrum.upper_growth
        self.beta = mp.mpf(beta)
        self.g = mp.mpf(gamma) + shift
        self.power = power
        self.coeffs = coeffs
        self.node_gap = node_gap  # callable m -> lower bound on |lambda_s - node| for |s|>m
        self.last = mp.inf

    def __call__(self, m: int):
        m1 = max(m + 1, self.coeffs.env_start)
        # the majorant is used from |s| = m1 on; terms between m+1 and m1 are
        # summed exactly before the bound is trusted
        if m1 > m + 1:
            return mp.inf
        env = self.coeffs.envelope(m1)
        if env is None:
            return mp.inf
        base = self.beta * m1 + self.g
        t = 2 * env**2 * base**self.power
        if self.node_gap is not None:
            gap = self.node_gap(m)
            if gap <= 0:
                return mp.inf
            t /= gap**2
        r = self.coeffs.envelope_ratio(m1)
        q = r**2 * ((base + self.beta) / base) ** self.power
        if q >= 1:
            return mp.inf
        bound = t / (1 - q)
        self.last = min(self.last, bound)
        return self.last


def _node_gap(ctx: NodalContext):
    sp = ctx.spectrum
    top, bottom = ctx.nodes[-1], ctx.nodes[0]

    def gap(m):
        return min(sp.eval(m + 1) - top, bottom - sp.eval(-m - 1))

    return gap


def _outward_indices(n: int, rng):
    """Yield (m, [s...]) for m = n+1, n+2, ...; restricted to rng when finite."""
    if rng is None:
        m = n + 1
        while True:
            yield m, (m, -m)
            m += 1
    lo, hi = rng
    m = n + 1
    while m <= max(hi, -lo):
        yield m, tuple(s for s in (m, -m) if lo <= s <= hi)
        m += 1


def _check_index(ctx, i):
    if abs(i) > ctx.n:
        raise IndexOutOfWindow(f"index {i} outside window [-{ctx.n}, {ctx.n}]")


def tail_sum_kij(
    ctx: NodalContext,
    coeffs: CoefficientSequence,
    i: int,
    j: int,
    cfg: PrecisionConfig,
) -> TailSumResult:
    _check_index(ctx, i)
    _check_index(ctx, j)
    with cfg.workprec():
        lam_i, lam_j = ctx.node(i), ctx.node(j)
        rng = summation_range(ctx.spectrum, coeffs)
        maj = None
        if rng is None:
            _check_certifiable(ctx.spectrum, coeffs)
            maj = _Majorant(
                ctx.spectrum, coeffs, 4 * ctx.n + 2, ctx.max_abs_node, _node_gap(ctx)
            )
        total = mp.zero
        used = 0
        bound = mp.zero
        tol = mp.mpf(cfg.tail_rel_tol)
        for m, idx in _outward_indices(ctx.n, rng):
            for s in idx:
                w = _weight(ctx, coeffs, s)
                if w:
                    lam_s = ctx.spectrum.eval(s)
                    total += w / ((lam_s - lam_i) * (lam_s - lam_j))
                used += 1
            if maj is None:
                continue
            bound = maj(m)
            target = tol * abs(total) if total != 0 else tol
            if bound <= target:
                break
            if used > cfg.max_tail_terms:
                raise ToleranceUnreachable(
                    f"tail bound {mp.nstr(bound, 5)} above target after {used} terms"
                )
        return TailSumResult(LogSigned.from_value(total), bound, used, coeffs.tail_assumed_zero)


@dataclass(frozen=True)
class TailMatrix:
    """All S_ij for the window, from one shared pass over s."""

    sums: list  # (2n+1) x (2n+1) nested lists of mpf, symmetric
    truncation_bound: object
    terms_used: int
    tail_assumed_zero: bool


def tail_sum_matrix(
    ctx: NodalContext, coeffs: CoefficientSequence, cfg: PrecisionConfig
) -> TailMatrix:
    """Every S_ij at once. Stops when the common remainder bound is below
    tail_rel_tol * min_i S_ii, which by Cauchy-Schwarz also controls each
    off-diagonal entry relative to sqrt(S_ii S_jj)."""
    size = ctx.window.size
    with cfg.workprec():
        rng = summation_range(ctx.spectrum, coeffs)
        maj = None
        if rng is None:
            _check_certifiable(ctx.spectrum, coeffs)
            maj = _Majorant(
                ctx.spectrum, coeffs, 4 * ctx.n + 2, ctx.max_abs_node, _node_gap(ctx)
            )
        S = [[mp.zero] * size for _ in range(size)]
        nodes = ctx.nodes
        tol = mp.mpf(cfg.tail_rel_tol)
        used = 0
        bound = mp.zero
        for m, idx in _outward_indices(ctx.n, rng):
            for s in idx:
                used += 1
                w = _weight(ctx, coeffs, s)
                if not w:
                    continue
                lam_s = ctx.spectrum.eval(s)
                inv = [1 / (lam_s - x) for x in nodes]
                for a in range(size):
                    wa = w * inv[a]
                    row = S[a]
                    for b in range(a, size):
                        row[b] += wa * inv[b]
            if maj is None:
                continue
            bound = maj(m)
            diag_min = min(S[a][a] for a in range(size))
            target = tol * diag_min if diag_min > 0 else tol
            if bound <= target:
                break
            if used > cfg.max_tail_terms:
                raise ToleranceUnreachable(
                    f"tail bound {mp.nstr(bound, 5)} above target after {used} terms"
                )
        for a in range(size):
            for b in range(a):
                S[a][b] = S[b][a]
        return TailMatrix(S, bound, used, coeffs.tail_assumed_zero)


def gram_entry_series(
    spectrum: Spectrum,
    coeffs: CoefficientSequence,
    p: int,
    cfg: PrecisionConfig,
) -> TailSumResult:
    """sum over all s of lambda_s^p |c_s|^2."""
    with cfg.workprec():
        rng = summation_range(spectrum, coeffs)
        maj = None
        if rng is None:
            _check_certifiable(spectrum, coeffs)
            maj = _Majorant(spectrum, coeffs, p, 0)
        total = mp.zero
        used = 0
        bound = mp.zero
        tol = mp.mpf(cfg.tail_rel_tol)
        if rng is None or rng[0] <= 0 <= rng[1]:
            a2 = coeffs.abs2(0)
            if a2:
                total += spectrum.eval(0) ** p * a2
            used = 1
        for m, idx in _outward_indices(0, rng):
            for s in idx:
                a2 = coeffs.abs2(s)
                if a2:
                    total += spectrum.eval(s) ** p * a2
                used += 1
            if maj is None:
                continue
            bound = maj(m)
            target = tol * abs(total) if total != 0 else tol
            if bound <= target:
                break
            if used > cfg.max_tail_terms:
                raise ToleranceUnreachable(
                    f"moment bound {mp.nstr(bound, 5)} above target after {used} terms"
                )
        return TailSumResult(LogSigned.from_value(total), bound, used, coeffs.tail_assumed_zero)


def gram_moments(
    spectrum: Spectrum, coeffs: CoefficientSequence, pmax: int, cfg: PrecisionConfig
) -> tuple[list, list]:
    """Moments for p = 0..pmax, each certified independently."""
    vals, bounds = [], []
    for p in range(pmax + 1):
        r = gram_entry_series(spectrum, coeffs, p, cfg)
        vals.append(r.real)
        bounds.append(r.truncation_bound)
    return vals, bounds
