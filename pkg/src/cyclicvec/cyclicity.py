"""K-matrix route to the projection distance.

For a window of 2n+1 eigenvalues the squared distance from e_k to
span{f, Af, ..., A^{2n} f} is

    rho^2 = 1 - <(E + K)^{-1} e^(k), e^(k)>,

where K is assembled entrywise from nodal-polynomial values and the
out-of-window tail sums. This module builds K, evaluates that quadratic form,
and the two diagonal-dominance upper bounds on rho^2.
"""
from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from mpmath import mp

from . import _linalg
from .errors import (
    DegenerateDenominatorWarning,
    EmptySupport,
    NotPSD,
    ZeroCoefficientInWindow,
)
from .nodal_poly import NodalContext, eval_Pdot_at_node
from .spectral_core import (
    CoefficientSequence,
    LogSigned,
    PrecisionConfig,
    RelabeledCoefficients,
    RelabeledSpectrum,
    Spectrum,
    logsigned_mul,
)
from .tail_series import tail_sum_matrix


@dataclass(frozen=True)
class KMatrix:
    n: int
    entries: list  # nested lists, position a <-> window index a - n
    truncation_bound_max: object
    terms_used: int = 0
    tail_assumed_zero: bool = False

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i + self.n][j + self.n]

    def diag(self, k: int):
        return mp.re(self[k, k])

    def frobenius_norm(self):
        return mp.sqrt(sum(abs(x) ** 2 for row in self.entries for x in row))

    def min_eigenvalue(self):
        return min(mp.eighe(mp.matrix(self.entries), eigvals_only=True))


@dataclass
class CriterionReport:
    k: int
    n: int
    q: object
    rho2: object
    k_kk: object
    bound_t2: object
    bound_refined: object
    condition1_ok: bool = True
    refined_degenerate: bool = False
    tail_bound: object = 0
    tail_terms: int = 0
    tail_assumed_zero: bool = False
    solve_residual: object = 0
    relabeled: bool = False
    window_k: Optional[int] = None
    note: str = ""


# ---------------------------------------------------------------------------
# relabeling when some coefficients vanish


@dataclass(frozen=True)
class Relabeling:
    coeffs: CoefficientSequence
    spectrum: Optional[Spectrum]
    forward: object  # s -> original index m_s
    backward: object  # original index -> s, or None when c_m = 0
    identity: bool

    def original_index(self, s: int) -> int:
        return self.forward(s)

    def relabeled_index(self, m: int) -> Optional[int]:
        return self.backward(m)


class _SkipZerosMap:
    """Order-preserving enumeration of Z minus a finite zero set, s=0 sent to
    the first nonnegative survivor."""

    def __init__(self, zeros):
        self.pos = sorted(z for z in zeros if z >= 0)
        self.neg = sorted((z for z in zeros if z < 0), reverse=True)
        self.zeros = frozenset(zeros)

    def __call__(self, s: int) -> int:
        if s >= 0:
            m = s
            while True:
                nxt = s + bisect.bisect_right(self.pos, m)
                if nxt == m:
                    return m
                m = nxt
        m = s
        while True:
            cnt = sum(1 for z in self.neg if z >= m)
            nxt = s - cnt
            if nxt == m:
                return m
            m = nxt

    def inverse(self, m: int) -> Optional[int]:
        if m in self.zeros:
            return None
        if m >= 0:
            return m - bisect.bisect_left(self.pos, m)
        return m + sum(1 for z in self.neg if z > m)


class _ListMap:
    def __init__(self, indices: Sequence[int], zero_pos: int):
        self.indices = list(indices)
        self.zero_pos = zero_pos
        self.lookup = {m: p - zero_pos for p, m in enumerate(self.indices)}

    @property
    def index_range(self):
        return (-self.zero_pos, len(self.indices) - 1 - self.zero_pos)

    def __call__(self, s: int) -> int:
        return self.indices[s + self.zero_pos]

    def inverse(self, m: int) -> Optional[int]:
        return self.lookup.get(m)


def relabel_support(
    coeffs: CoefficientSequence,
    spectrum: Optional[Spectrum] = None,
    scan: int = 256,
) -> Relabeling:
    """Drop vanishing coefficients and renumber the survivors in order.

    Finite sequences are scanned over their support. For infinite sequences
    the zeros are looked for in [-scan, scan] (or taken from ``zero_indices``
    for masked sequences); the remainder is assumed zero-free.
    """
    sup = coeffs.support()
    if sup is not None:
        lo, hi = sup
        nz = [j for j in range(lo, hi + 1) if not coeffs.is_zero(j)]
        if not nz:
            raise EmptySupport("all coefficients vanish")
        if len(nz) == hi - lo + 1 and lo <= 0 <= hi:
            return Relabeling(coeffs, spectrum, lambda s: s, lambda m: m if lo <= m <= hi else None, True)
        nonneg = [j for j in nz if j >= 0]
        zero_pos = nz.index(nonneg[0]) if nonneg else len(nz) - 1
        lm = _ListMap(nz, zero_pos)
        rng = lm.index_range
        new_coeffs = RelabeledCoefficients(base=coeffs, index_map=lm, index_range=rng)
        new_spec = None
        if spectrum is not None:
            new_spec = RelabeledSpectrum(
                base=spectrum, index_map=lm, extra_offset=max(abs(x) for x in nz), index_range=rng
            )
        return Relabeling(new_coeffs, new_spec, lm, lm.inverse, False)

    zero_set = getattr(coeffs, "zero_indices", None)
    if zero_set is None:
        zero_set = {j for j in range(-scan, scan + 1) if coeffs.is_zero(j)}
    zero_set = set(zero_set)
    if len(zero_set) >= 2 * scan + 1 and all(j in zero_set for j in range(-scan, scan + 1)):
        raise EmptySupport("all queried coefficients vanish")
    if not zero_set:
        return Relabeling(coeffs, spectrum, lambda s: s, lambda m: m, True)
    sm = _SkipZerosMap(zero_set)
    new_coeffs = RelabeledCoefficients(base=coeffs, index_map=sm)
    new_spec = None
    if spectrum is not None:
        new_spec = RelabeledSpectrum(base=spectrum, index_map=sm, extra_offset=len(zero_set))
    return Relabeling(new_coeffs, new_spec, sm, sm.inverse, False)


# ---------------------------------------------------------------------------
# K matrix


def _unit_phase(c):
    if mp.im(c) == 0:
        return mp.one if mp.re(c) > 0 else -mp.one
    return c / abs(c)


def build_K(ctx: NodalContext, coeffs: CoefficientSequence, cfg: PrecisionConfig) -> KMatrix:
    n = ctx.n
    size = ctx.window.size
    with cfg.workprec():
        cs = [coeffs.eval(i) for i in ctx.window.indices]
        for i, c in zip(ctx.window.indices, cs):
            if c == 0:
                raise ZeroCoefficientInWindow(i)
        tails = tail_sum_matrix(ctx, coeffs, cfg)
        # log-scale per index: 1 / (|c_i| P'(lambda_i))
        scale = []
        for i, c in zip(ctx.window.indices, cs):
            pdot = eval_Pdot_at_node(ctx, i)
            scale.append(logsigned_mul(pdot, LogSigned.from_value(abs(c))).reciprocal())
        phases = [_unit_phase(c) for c in cs]
        complex_entries = any(mp.im(p) != 0 for p in phases)
        K = [[mp.zero] * size for _ in range(size)]
        worst = mp.zero
        for a in range(size):
            for b in range(a, size):
                mag = logsigned_mul(
                    logsigned_mul(LogSigned.from_value(tails.sums[a][b]), scale[a]), scale[b]
                ).to_value()
                # 1 / (c_i conj(c_j)) = conj(phase_i) phase_j / (|c_i||c_j|)
                ph = mp.conj(phases[a]) * phases[b]
                val = mag * ph if complex_entries else mag * mp.re(ph)
                if a == b:
                    val = mp.re(val) if complex_entries else val
                K[a][b] = val
                K[b][a] = mp.conj(val) if complex_entries else val
                if tails.truncation_bound:
                    eb = LogSigned.from_value(tails.truncation_bound) * scale[a] * scale[b]
                    worst = max(worst, abs(eb.to_value()))
        return KMatrix(n, K, worst, tails.terms_used, tails.tail_assumed_zero)


# ---------------------------------------------------------------------------
# criterion and bounds


def _check_k(K: KMatrix, k: int):
    # the identity B_0^{-1} b^(k) = e^(k) holds for every window index
    if not abs(k) <= K.n:
        raise ValueError(f"target index k={k} must lie in the window [-{K.n}, {K.n}]")


def theorem2_bound(K: KMatrix, k: int):
    _check_k(K, k)
    kkk = K.diag(k)
    return kkk / (1 + kkk)


def _refined(K: KMatrix, k: int, index_range: str = "symmetric"):
    """(value, degenerate) for the two-term upper bound on rho^2."""
    _check_k(K, k)
    kkk = K.diag(k)
    t2 = kkk / (1 + kkk)
    if index_range == "symmetric":
        idx = [i for i in range(-K.n, K.n + 1) if i != k]
    elif index_range == "literal":
        idx = [i for i in range(1, K.n + 1) if i != k]
    else:
        raise ValueError(f"unknown index_range {index_range!r}")
    w2 = sum((abs(K[i, k]) ** 2 for i in idx), mp.zero)
    triple = mp.zero
    for j in idx:
        for i in idx:
            triple += K[k, j] * K[j, i] * K[i, k]
    triple = mp.re(triple)
    denom = w2 + triple
    if w2 == 0:
        return t2, False
    if denom == 0:
        return t2, True
    value = t2 - w2**2 / denom / (1 + kkk) ** 2
    return min(max(value, mp.zero), t2), False


def refined_bound(K: KMatrix, k: int, index_range: str = "symmetric"):
    """Sharper bound: Theorem-2 value minus a Schur-complement correction
    built from column k of K. ``index_range='literal'`` sums only over
    i, j in 1..n (minus k)."""
    value, degenerate = _refined(K, k, index_range)
    if degenerate:
        warnings.warn(
            "refined bound denominator vanished; falling back to k_kk/(1+k_kk)",
            DegenerateDenominatorWarning,
            stacklevel=2,
        )
    return value


def criterion_value(K: KMatrix, k: int, cfg: PrecisionConfig) -> CriterionReport:
    _check_k(K, k)
    with cfg.workprec():
        size = K.size
        M = [[K.entries[a][b] + (1 if a == b else 0) for b in range(size)] for a in range(size)]
        e = [mp.zero] * size
        e[k + K.n] = mp.one
        x, res = _linalg.hpd_solve(M, e, mp.mpf(cfg.solve_rel_tol))
        q = mp.re(x[k + K.n])
        rho2 = 1 - q
        kkk = K.diag(k)
        t2 = kkk / (1 + kkk)
        refined, degenerate = _refined(K, k)
        return CriterionReport(
            k=k,
            n=K.n,
            q=q,
            rho2=rho2,
            k_kk=kkk,
            bound_t2=t2,
            bound_refined=refined,
            refined_degenerate=degenerate,
            tail_bound=K.truncation_bound_max,
            tail_terms=K.terms_used,
            tail_assumed_zero=K.tail_assumed_zero,
            solve_residual=res,
            window_k=k,
        )


def kantorovich_check(M, e, cfg: Optional[PrecisionConfig] = None):
    """<M^{-1} e, e> * <M e, e> for Hermitian positive-definite M and unit e."""
    cfg = cfg or PrecisionConfig()
    with cfg.workprec():
        if hasattr(M, "tolist"):
            M = M.tolist()
        M = [[mp.mpmathify(x) for x in row] for row in M]
        e = [mp.mpmathify(x) for x in e]
        if not _linalg.is_hermitian(M, tol=mp.eps * 16 * _linalg.inf_norm_mat(M)):
            raise NotPSD("matrix is not Hermitian")
        L = _linalg.cholesky(M)
        y = _linalg.cholesky_solve(L, e)
        Me = _linalg.matvec(M, e)
        inner_inv = mp.re(sum(yi * mp.conj(ei) for yi, ei in zip(y, e)))
        inner = mp.re(sum(mi * mp.conj(ei) for mi, ei in zip(Me, e)))
        return inner_inv * inner


# ---------------------------------------------------------------------------
# convenience: full analysis of one (k, n) cell


def condition1_holds(coeffs: CoefficientSequence, spectrum: Spectrum, scan: int = 256) -> bool:
    """Whether (f, e_j) != 0 for every eigenvalue index j, as far as can be
    checked: exhaustively on finite spectra, never for finitely supported f on
    an infinite spectrum, otherwise on ``zero_indices`` or over [-scan, scan]."""
    rng = spectrum.index_range
    if rng is not None:
        return not any(coeffs.is_zero(j) for j in range(rng[0], rng[1] + 1))
    if coeffs.support() is not None:
        return False
    zeros = getattr(coeffs, "zero_indices", None)
    if zeros is not None:
        return not zeros
    return not any(coeffs.is_zero(j) for j in range(-scan, scan + 1))


def analyze(
    spectrum: Spectrum,
    coeffs: CoefficientSequence,
    k: int,
    n: int,
    cfg: PrecisionConfig,
) -> CriterionReport:
    """rho^2(e_k, L_{2n+1}(f)) by the K route, relabeling around vanishing
    coefficients when needed.

    If (f, e_k) = 0 then e_k is orthogonal to every A^l f, rho^2 = 1 and the
    report is flagged ``condition1_ok=False``.
    """
    with cfg.workprec():
        if coeffs.is_zero(k):
            one = mp.one
            return CriterionReport(
                k=k, n=n, q=mp.zero, rho2=one, k_kk=mp.inf, bound_t2=one,
                bound_refined=one, condition1_ok=False,
                note="condition1_failed: (f, e_k) = 0, so f is not cyclic",
            )
        cond1 = condition1_holds(coeffs, spectrum)
        window_has_zero = any(coeffs.is_zero(i) for i in range(-n, n + 1))
        if not window_has_zero:
            ctx = NodalContext.build(spectrum, n, cfg)
            rep = criterion_value(build_K(ctx, coeffs, cfg), k, cfg)
        else:
            rl = relabel_support(coeffs, spectrum)
            kt = rl.relabeled_index(k)
            ctx = NodalContext.build(rl.spectrum, n, cfg)
            rep = criterion_value(build_K(ctx, rl.coeffs, cfg), kt, cfg)
            rep.k = k
            rep.window_k = kt
            rep.relabeled = True
            rep.note = "relabeled: vanishing coefficients removed from the window"
        if not cond1:
            rep.condition1_ok = False
            rep.note = "; ".join(
                x for x in (rep.note, "condition1_failed: some (f, e_j) = 0, f is not cyclic in H; "
                            "rho2 refers to the closed span of the surviving eigenvectors") if x
            )
        return rep


def limit_diagnostics(rho2_values: Sequence) -> dict:
    """Finite-n evidence about lim rho^2: successive ratios and the last
    log-decrement. The limit itself cannot be decided from finitely many n."""
    vals = [mp.mpf(v) for v in rho2_values]
    ratios = [b / a if a else None for a, b in zip(vals, vals[1:])]
    monotone = all(b <= a + mp.mpf("1e-15") for a, b in zip(vals, vals[1:]))
    last_rate = None
    if len(vals) >= 2 and vals[-1] > 0 and vals[-2] > 0:
        last_rate = mp.log(vals[-2] / vals[-1])
    return {"ratios": ratios, "monotone": monotone, "last_log_decrement": last_rate}
