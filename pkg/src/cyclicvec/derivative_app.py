"""Completeness of the derivative system f, f', f'', ... in L2(-pi, pi).

The operator is i d/dx with periodic boundary conditions: eigenvalues
lambda_k = k and eigenfunctions e_k(x) = exp(-ikx)/sqrt(2 pi). Coefficient
sequences here always hold orthonormal inner products (f, e_k); the raw
integrals used in the decay hypothesis differ by a factor sqrt(2 pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .errors import GridTooCoarse, NoZeroFound, SpecError, ZeroCoefficient
from .nodal_poly import NodalContext, eval_P_integer, eval_Pdot_at_node
from .spectral_core import (
    CoefficientSequence,
    IntegerLine,
    PrecisionConfig,
    TableCoefficients,
    log_factorial,
)
from .tail_series import tail_sum_kij


# ---------------------------------------------------------------------------
# threshold constants


@dataclass(frozen=True)
class ThresholdConstants:
    c0: object
    sigma: object
    residual: object

    @property
    def delta_threshold(self):
        return self.sigma


def solve_c0(cfg: Optional[PrecisionConfig] = None) -> ThresholdConstants:
    """Positive root of c^2 = exp(1/c^2), found as the root of
    g(c) = 2 ln c - 1/c^2 on [1, 2], and sigma = (6 c0^2 + 2) / (3 c0^3)."""
    cfg = cfg or PrecisionConfig()
    with cfg.workprec():
        lo, hi = mp.mpf(1), mp.mpf(2)
        c = mp.mpf("1.5")
        tol = mp.mpf("1e-35")
        for _ in range(200):
            g = 2 * mp.log(c) - 1 / c**2
            if abs(g) <= tol:
                break
            if g < 0:
                lo = c
            else:
                hi = c
            step = c - g / (2 / c + 2 / c**3)
            # g is increasing; keep Newton inside the bracket
            c = step if lo < step < hi else (lo + hi) / 2
        sigma = (6 * c**2 + 2) / (3 * c**3)
        residual = c**2 - mp.exp(1 / c**2)
        return ThresholdConstants(+c, +sigma, residual)


# ---------------------------------------------------------------------------
# e^{a cos x}


@dataclass(frozen=True)
class ExpCosCoefficients(CoefficientSequence):
    """(f, e_k) for f(x) = exp(a cos x), a real and nonzero.

    c_k = sqrt(2 pi) (a/2)^|k| sum_m |a/2|^(2m) / (m! (m+|k|)!), which is
    sqrt(2 pi) I_|k|(a); the sequence is even in k.
    """

    a: object = 1
    kind = "exp-cos"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if mp.mpf(self.a) == 0:
            raise SpecError("exp-cos needs a != 0")

    def series(self, k: int):
        """sum_m |a/2|^(2m) / (m! (m+k)!) for k >= 0."""
        key = (k, mp.prec)
        if key in self._cache:
            return self._cache[key]
        h2 = (abs(mp.mpf(self.a)) / 2) ** 2
        term = 1 / mp.factorial(k)
        total = term
        rel = min(mp.mpf("1e-40"), mp.eps)
        m = 0
        while True:
            m += 1
            term *= h2 / (m * (m + k))
            total += term
            # remaining terms shrink at least geometrically from here
            ratio = h2 / ((m + 1) * (m + 1 + k))
            if ratio < mp.mpf(1) / 2 and term <= rel * total:
                break
        self._cache[key] = total
        return total

    def raw_integral(self, k: int):
        """int_{-pi}^{pi} exp(a cos x) exp(-ikx) dx."""
        k = abs(int(k))
        return 2 * mp.pi * (mp.mpf(self.a) / 2) ** k * self.series(k)

    def eval(self, k):
        return self.raw_integral(k) / mp.sqrt(2 * mp.pi)

    def envelope(self, m):
        h = abs(mp.mpf(self.a)) / 2
        return mp.sqrt(2 * mp.pi) * h**m * mp.exp(h * h) / mp.factorial(m)

    def envelope_ratio(self, m):
        return (abs(mp.mpf(self.a)) / 2) / (m + 1)

    def raw_envelope(self, k: int):
        """2 pi |a/2|^k e^{a^2/4} / k!."""
        h = abs(mp.mpf(self.a)) / 2
        return 2 * mp.pi * h**k * mp.exp(h * h) / mp.factorial(k)


def expcos_coefficients(a) -> ExpCosCoefficients:
    return ExpCosCoefficients(a=a)


# ---------------------------------------------------------------------------
# periodic functions and quadrature


@dataclass(frozen=True)
class PeriodicFunctionSpec:
    """A 2pi-periodic function on [-pi, pi].

    kind is "exp-cos" (param ``a``), "bump" (support radius ``radius`` < pi)
    or "grid" (``values`` sampled at x_m = -pi + 2 pi m / N, m < N; a
    trailing sample at x = pi is accepted and checked against the first).
    """

    kind: str
    a: object = None
    radius: object = None
    values: tuple = ()
    smoothness: str = ""

    def __post_init__(self):
        if self.kind == "grid":
            vals = list(self.values)
            N = len(vals)
            endpoint_included = N & (N - 1) and (N - 1) & (N - 2) == 0
            if endpoint_included:
                if abs(mp.mpmathify(vals[0]) - mp.mpmathify(vals[-1])) > 1e-9 * max(
                    1, abs(mp.mpmathify(vals[0]))
                ):
                    raise SpecError("grid endpoint values f(-pi) and f(pi) disagree")
                vals = vals[:-1]
                N -= 1
            if N < 64 or N & (N - 1):
                raise SpecError(f"grid length must be a power of two >= 64, got {N}")
            object.__setattr__(self, "values", tuple(vals))
        elif self.kind == "bump":
            r = mp.mpf(self.radius if self.radius is not None else mp.mpf("0.9") * mp.pi)
            if not (0 < r < mp.pi):
                raise SpecError("bump support radius must lie in (0, pi)")
        elif self.kind == "exp-cos":
            if self.a is None or mp.mpf(self.a) == 0:
                raise SpecError("exp-cos needs a != 0")
        else:
            raise SpecError(f"unknown periodic function kind {self.kind!r}")

    @classmethod
    def bump(cls, radius=None):
        return cls("bump", radius=radius, smoothness="C-infinity, compact support")

    @property
    def bump_radius(self):
        return mp.mpf(self.radius) if self.radius is not None else mp.mpf("0.9") * mp.pi

    def __call__(self, x):
        x = mp.mpf(x)
        if self.kind == "exp-cos":
            return mp.exp(mp.mpf(self.a) * mp.cos(x))
        if self.kind == "bump":
            t = x / self.bump_radius
            if abs(t) >= 1:
                return mp.zero
            return mp.exp(-1 / (1 - t * t))
        raise TypeError("grid functions are only available through their samples")

    def samples(self, N: int):
        if self.kind == "grid":
            return [mp.mpmathify(v) for v in self.values]
        return [self(-mp.pi + 2 * mp.pi * m / N) for m in range(N)]


@dataclass(frozen=True)
class QuadratureCoefficients(TableCoefficients):
    aliasing_estimate: object = 0
    grid_size: int = 0
    kind = "quadrature"


def _fft(values, roots, stride=1):
    """Radix-2 transform sum_m v_m w^(km), w = roots[1]; len(values) a power of two."""
    N = len(values)
    if N == 1:
        return [values[0]]
    even = _fft(values[0::2], roots, stride * 2)
    odd = _fft(values[1::2], roots, stride * 2)
    out = [None] * N
    half = N // 2
    for k in range(half):
        t = roots[k * stride] * odd[k]
        out[k] = even[k] + t
        out[k + half] = even[k] - t
    return out


def _dft_coefficients(samples):
    """c_k = sqrt(2 pi)/N * sum_m f(x_m) exp(i k x_m), x_m = -pi + 2 pi m/N,
    for -N/2 <= k <= N/2."""
    N = len(samples)
    roots = [mp.expjpi(mp.mpf(2 * m) / N) for m in range(N)]
    raw = _fft([mp.mpc(v) for v in samples], roots)
    scale = mp.sqrt(2 * mp.pi) / N
    out = {}
    for k in range(-(N // 2), N // 2 + 1):
        # exp(ik x_m) = exp(-i k pi) * exp(2 pi i k m / N)
        out[k] = raw[k % N] * scale * (-1 if k % 2 else 1)
    return out


def quadrature_coefficients(
    spec: PeriodicFunctionSpec, kmax: int, cfg: PrecisionConfig, N: Optional[int] = None
) -> QuadratureCoefficients:
    """Trapezoidal-rule (= DFT) inner products (f, e_k) for |k| <= kmax.

    The aliasing estimate is the largest coefficient magnitude in the top
    quarter N/4 < |k| <= N/2 of the discrete spectrum.
    """
    if spec.kind == "grid":
        N = len(spec.values)
    elif N is None:
        N = max(4096 if spec.kind == "bump" else 1024, 1 << (4 * max(kmax, 1) - 1).bit_length())
    if kmax > N // 4:
        raise GridTooCoarse(f"|k| <= {kmax} requested from a grid of {N} points (limit N/4 = {N // 4})")
    with cfg.workprec():
        samples = spec.samples(N)
        coeffs = _dft_coefficients(samples)
        alias = max(abs(coeffs[k]) for k in coeffs if N // 4 < abs(k) <= N // 2)
        vals = [coeffs[k] for k in range(-kmax, kmax + 1)]
        # drop rounding-level imaginary parts so even real functions stay real
        floor = 64 * mp.eps * max(abs(v) for v in vals)
        vals = [mp.re(v) if abs(mp.im(v)) <= floor else v for v in vals]
        return QuadratureCoefficients(
            values=tuple(vals), offset=-kmax, aliasing_estimate=alias, grid_size=N
        )


# ---------------------------------------------------------------------------
# decay hypothesis


@dataclass
class Theorem3Report:
    kmax: int
    C: object
    delta: object
    sigma: object
    all_nonzero: bool
    satisfied: bool
    verdict: str


def _upper_hull(points):
    """Upper convex hull (least concave majorant) of points sorted by x."""
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def theorem3_check(coeffs: CoefficientSequence, kmax: int, cfg: Optional[PrecisionConfig] = None) -> Theorem3Report:
    """Fit |int f e^{-ikx} dx| <= C exp(-delta |k|) on |k| <= kmax.

    delta is minus the slope of the last segment of the least concave majorant
    of (|k|, ln|raw_k|) over kmax/2 <= |k| <= kmax; C is then the smallest
    constant making the envelope hold on the whole sampled range. The verdict
    only speaks about the sampled range.
    """
    cfg = cfg or PrecisionConfig()
    with cfg.workprec():
        consts = solve_c0(cfg)
        root = mp.sqrt(2 * mp.pi)
        mags = {}
        for k in range(-kmax, kmax + 1):
            c = coeffs.eval(k)
            if c == 0:
                raise ZeroCoefficient(k)
            mags[k] = abs(c) * root
        per_abs = {m: max(mags[m], mags[-m]) for m in range(0, kmax + 1)}
        start = kmax // 2
        pts = [(mp.mpf(m), mp.log(per_abs[m])) for m in range(start, kmax + 1)]
        hull = _upper_hull(pts)
        if len(hull) < 2:
            raise ValueError("need at least two sample points to fit a decay rate")
        (x1, y1), (x2, y2) = hull[-2], hull[-1]
        delta = -(y2 - y1) / (x2 - x1)
        C = max(per_abs[m] * mp.exp(delta * m) for m in range(0, kmax + 1))
        ok = delta > consts.sigma
        if ok:
            verdict = "hypothesis satisfied on sampled range"
        else:
            verdict = (
                f"hypothesis not satisfied (delta ~ {mp.nstr(delta, 4)} <= sigma = "
                f"{mp.nstr(consts.sigma, 4)})"
            )
        return Theorem3Report(kmax, C, delta, consts.sigma, True, ok, verdict)


def theorem3_tail_quantity(k: int, n: int, coeffs: CoefficientSequence, cfg: PrecisionConfig):
    """P'(k)^-2 * sum_{|s|>n} P(s)^2 |c_s|^2 / (s-k)^2 on the integer spectrum,
    with P'(k)^2 = ((n+k)!(n-k)!)^2."""
    if not abs(k) < n:
        raise ValueError(f"need |k| < n, got k={k}, n={n}")
    ctx = NodalContext.build(IntegerLine(), n, cfg)
    tail = tail_sum_kij(ctx, coeffs, k, k, cfg)
    with cfg.workprec():
        if tail.value.sign == 0:
            return mp.zero
        log_pdot2 = 2 * (log_factorial(n + k) + log_factorial(n - k))
        return mp.exp(tail.value.logmag - log_pdot2)


# ---------------------------------------------------------------------------
# proof-chain checks


def nodal_exponential_bound(n: int, s: int):
    """(P(s), s^(2n+1) exp(-n^3 / (3 s^2))) for integer s > n."""
    p = eval_P_integer(n, s).to_value()
    s = mp.mpf(s)
    return p, s ** (2 * n + 1) * mp.exp(-mp.mpf(n) ** 3 / (3 * s * s))


def tail_maximizer(n: int, sigma, span: float = 10.0, points: int = 20000):
    """Grid maximiser of 4n ln s - 2n^3/(3 s^2) - 2 sigma s over n < s <= span*n,
    refined by golden-section search around the best grid point."""
    n_ = mp.mpf(n)

    def h(s):
        return 4 * n_ * mp.log(s) - 2 * n_**3 / (3 * s * s) - 2 * sigma * s

    lo, hi = n_, span * n_
    step = (hi - lo) / points
    best_i = max(range(1, points + 1), key=lambda i: h(lo + i * step))
    a, b = lo + (best_i - 1) * step, lo + min(best_i + 1, points) * step
    invphi = (mp.sqrt(5) - 1) / 2
    for _ in range(100):
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        if h(c) > h(d):
            b = d
        else:
            a = c
    return (a + b) / 2


# ---------------------------------------------------------------------------
# bump functions are not cyclic


def bump_transform(spec: PeriodicFunctionSpec, lam):
    """Phi(lam) = int phi(x) exp(-i lam x) dx, real for the even bump."""
    R = spec.bump_radius
    lam = mp.mpf(lam)
    pieces = int(mp.ceil(abs(lam) * R / mp.pi)) + 2
    pts = [R * i / pieces for i in range(pieces + 1)]
    return 2 * mp.quad(lambda x: spec(x) * mp.cos(lam * x), pts)


def find_transform_zero(spec: PeriodicFunctionSpec, lam_max=50, step="0.25", tol="1e-20", dps=45):
    """First sign change of Phi on (0, lam_max], refined by bisection."""
    with mp.workdps(dps):
        step = mp.mpf(step)
        a = step
        fa = bump_transform(spec, a)
        b = a
        while b < lam_max:
            b = a + step
            fb = bump_transform(spec, b)
            if fa == 0:
                return a, fa
            if fa * fb < 0:
                break
            a, fa = b, fb
        else:
            raise NoZeroFound(f"no sign change of the transform on (0, {lam_max}]")
        tol = mp.mpf(tol)
        for _ in range(400):
            mid = (a + b) / 2
            fm = bump_transform(spec, mid)
            if abs(fm) <= tol / 10 or b - a < mp.eps * 8:
                return mid, fm
            if fa * fm < 0:
                b = mid
            else:
                a, fa = mid, fm
        return mid, fm


@dataclass
class BumpDemoReport:
    radius: object
    lambda0: object
    phi_at_lambda0: object
    rho2_by_n: dict
    min_rho2: object
    contrast_rho2_by_n: dict
    aliasing_estimate: object
    kmax: int


def bump_noncyclicity_demo(
    radius=None,
    kmax: int = 48,
    nmax: int = 8,
    cfg: Optional[PrecisionConfig] = None,
    k: int = 0,
    nmin: int = 2,
    route: str = "kmatrix",
) -> BumpDemoReport:
    """rho^2(e_k, L_{2n+1}(phi)) for n = nmin..nmax next to the same sweep for
    exp(cos x), plus a real zero of the bump's Fourier transform."""
    from .cyclicity import analyze
    from .gram_oracle import build_gram, rho2_via_gram

    cfg = cfg or PrecisionConfig()
    spec = PeriodicFunctionSpec.bump(radius)
    lam0, phi0 = find_transform_zero(spec)
    coeffs = quadrature_coefficients(spec, kmax, cfg)
    contrast = expcos_coefficients(1)
    rho, rho_c = {}, {}
    for n in range(nmin, nmax + 1):
        if route == "gram":
            rho[n] = rho2_via_gram(build_gram(IntegerLine(), coeffs, n, cfg), k, cfg)
        else:
            rho[n] = analyze(IntegerLine(), coeffs, k, n, cfg).rho2
        rho_c[n] = analyze(IntegerLine(), contrast, k, n, cfg).rho2
    return BumpDemoReport(
        radius=spec.bump_radius,
        lambda0=lam0,
        phi_at_lambda0=phi0,
        rho2_by_n=rho,
        min_rho2=min(rho.values()),
        contrast_rho2_by_n=rho_c,
        aliasing_estimate=coeffs.aliasing_estimate,
        kmax=kmax,
    )
