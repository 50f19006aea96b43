"""Nodal polynomial P(x) = prod_{i=-n..n} (x - lambda_i) over a window of the
spectrum, its derivative at the nodes, and the Lagrange weights built from them.

Values come back as :class:`LogSigned` because P grows like |x|^(2n+1) and the
node derivatives like factorial products.
"""
from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .errors import IndexOutOfWindow, NodeCollision
from .spectral_core import (
    DEFAULT_CONFIG,
    AffineInteger,
    LogSigned,
    PrecisionConfig,
    Spectrum,
    Window,
    log_factorial,
    logsigned_mul,
)


@dataclass(frozen=True)
class NodalContext:
    spectrum: Spectrum
    window: Window
    nodes: tuple
    mantissa_bits: int

    @classmethod
    def build(cls, spectrum: Spectrum, n: int, cfg: PrecisionConfig = DEFAULT_CONFIG):
        window = Window(n)
        with cfg.workprec():
            nodes = tuple(spectrum.eval(i) for i in window.indices)
        if any(a >= b for a, b in zip(nodes, nodes[1:])):
            raise ValueError("window nodes are not strictly increasing")
        return cls(spectrum, window, nodes, cfg.mantissa_bits)

    @property
    def n(self) -> int:
        return self.window.n

    def node(self, i: int):
        if abs(i) > self.n:
            raise IndexOutOfWindow(f"node index {i} outside window [-{self.n}, {self.n}]")
        return self.nodes[i + self.n]

    @property
    def integer_line(self) -> bool:
        return self.spectrum.is_integer_line()

    @property
    def max_abs_node(self):
        return max(abs(self.nodes[0]), abs(self.nodes[-1]))

    def collides(self, mu, lam) -> bool:
        tol = mp.ldexp(mp.mpf(1), -(self.mantissa_bits // 2)) * max(mp.one, abs(lam))
        return abs(mu - lam) <= tol


def eval_P(ctx: NodalContext, lam) -> LogSigned:
    """log-signed P(lam); factors are accumulated in index order -n..n."""
    lam = mp.mpf(lam)
    logmag = mp.zero
    sign = 1
    for node in ctx.nodes:
        if ctx.collides(lam, node):
            return LogSigned.zero()
        d = lam - node
        if d < 0:
            sign = -sign
        logmag += mp.log(abs(d))
    return LogSigned(sign, logmag)


def eval_P_integer(n: int, s: int) -> LogSigned:
    """P at an integer point for the integer spectrum, via factorial ratios."""
    s = int(s)
    if abs(s) <= n:
        return LogSigned.zero()
    m = abs(s)
    # prod_{i=-n}^{n} (m - i) = (m+n)! / (m-n-1)!; P is odd
    logmag = log_factorial(m + n) - log_factorial(m - n - 1)
    return LogSigned(1 if s > 0 else -1, logmag)


def eval_Pdot_generic(ctx: NodalContext, i: int) -> LogSigned:
    lam_i = ctx.node(i)
    logmag = mp.zero
    sign = 1
    for j, node in zip(ctx.window.indices, ctx.nodes):
        if j == i:
            continue
        d = lam_i - node
        if d < 0:
            sign = -sign
        logmag += mp.log(abs(d))
    return LogSigned(sign, logmag)


def eval_Pdot_at_node(ctx: NodalContext, i: int) -> LogSigned:
    """Derivative of P at node i, i.e. prod_{j != i} (lambda_i - lambda_j).

    On integer and affine spectra this is ``(-1)^(n-i) (n+i)! (n-i)!`` (times
    a^(2n) for affine), computed from log-factorials.
    """
    n = ctx.n
    if abs(i) > n:
        raise IndexOutOfWindow(f"node index {i} outside window [-{n}, {n}]")
    sp = ctx.spectrum
    if ctx.integer_line or isinstance(sp, AffineInteger):
        logmag = log_factorial(n + i) + log_factorial(n - i)
        if isinstance(sp, AffineInteger):
            logmag += 2 * n * mp.log(mp.mpf(sp.a))
        return LogSigned(-1 if (n - i) % 2 else 1, logmag)
    return eval_Pdot_generic(ctx, i)


def lagrange_weight(ctx: NodalContext, i: int, mu) -> LogSigned:
    """P(mu) / (P'(lambda_i) (mu - lambda_i))."""
    mu = mp.mpf(mu)
    for node in ctx.nodes:
        if ctx.collides(mu, node):
            raise NodeCollision(f"mu={mp.nstr(mu, 20)} coincides with a node")
    p = eval_P(ctx, mu)
    denom = logsigned_mul(eval_Pdot_at_node(ctx, i), LogSigned.from_value(mu - ctx.node(i)))
    return p / denom
