"""Domain types shared by every module: spectra, coefficient sequences,
windows, precision settings and signed log-domain numbers.

All arithmetic is done with mpmath at the precision carried by a
:class:`PrecisionConfig`; callers enter it with ``cfg.workprec()``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .errors import IndexOutOfTable, SpecError

NEG_INF = mpmath.ninf


def to_mpf(x):
    """Exact conversion for ints/strings/floats; floats keep their binary value."""
    if isinstance(x, str):
        return mp.mpf(x)
    return mp.mpf(x)


def to_mpc(x):
    if isinstance(x, (list, tuple)):
        re, im = x
        return mp.mpc(to_mpf(re), to_mpf(im))
    if isinstance(x, complex):
        return mp.mpc(x.real, x.imag)
    if isinstance(x, mpmath.mpc):
        return x
    return mp.mpc(to_mpf(x), 0)


# ---------------------------------------------------------------------------
# precision


@dataclass(frozen=True)
class PrecisionConfig:
    mantissa_bits: int = 256
    tail_rel_tol: float = 1e-30
    solve_rel_tol: float = 1e-25
    # the Gram route is ill-conditioned; it may run at a higher precision
    gram_mantissa_bits: Optional[int] = None
    max_tail_terms: int = 200_000

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be >= 64")
        if self.gram_mantissa_bits is not None and self.gram_mantissa_bits < 64:
            raise ValueError("gram_mantissa_bits must be >= 64")
        for name in ("tail_rel_tol", "solve_rel_tol"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise ValueError(f"{name} must lie in (0, 1), got {v}")

    def workprec(self):
        return mp.workprec(self.mantissa_bits)

    @property
    def gram_bits(self) -> int:
        return self.gram_mantissa_bits or self.mantissa_bits

    def for_gram(self) -> "PrecisionConfig":
        return PrecisionConfig(
            mantissa_bits=self.gram_bits,
            tail_rel_tol=self.tail_rel_tol,
            solve_rel_tol=self.solve_rel_tol,
            max_tail_terms=self.max_tail_terms,
        )

    @property
    def eps(self):
        return mp.ldexp(mp.mpf(1), -self.mantissa_bits)


DEFAULT_CONFIG = PrecisionConfig()


# ---------------------------------------------------------------------------
# signed log-domain numbers


# extra bits carried by log magnitudes, so that a log/exp round trip of a
# number of size ~e^L loses about L * 2^-GUARD_BITS ulp instead of L ulp
GUARD_BITS = 32


@dataclass(frozen=True)
class LogSigned:
    """Real number stored as ``sign * exp(logmag)``.

    ``logmag`` is kept with ``GUARD_BITS`` more precision than the working
    precision; ``to_value`` rounds back to working precision.
    """

    sign: int
    logmag: object  # mpf, -inf for zero

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if (self.sign == 0) != (self.logmag == NEG_INF):
            raise ValueError("sign is 0 exactly when logmag is -inf")

    @classmethod
    def zero(cls) -> "LogSigned":
        return cls(0, NEG_INF)

    @classmethod
    def from_value(cls, x) -> "LogSigned":
        x = mp.mpf(x)
        if x == 0:
            return cls.zero()
        with mp.extraprec(GUARD_BITS):
            return cls(1 if x > 0 else -1, mp.log(abs(x)))

    def to_value(self):
        if self.sign == 0:
            return mp.zero
        with mp.extraprec(GUARD_BITS):
            v = mp.exp(self.logmag)
        return self.sign * v

    def __neg__(self):
        return LogSigned(-self.sign, self.logmag)

    def __mul__(self, other):
        return logsigned_mul(self, other)

    def reciprocal(self) -> "LogSigned":
        if self.sign == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return LogSigned(self.sign, -self.logmag)

    def __truediv__(self, other):
        return logsigned_mul(self, other.reciprocal())

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        if k == 0:
            return LogSigned(1, mp.zero)
        if self.sign == 0:
            return self
        with mp.extraprec(GUARD_BITS):
            return LogSigned(self.sign ** k, self.logmag * k)


def logsigned_mul(x: LogSigned, y: LogSigned) -> LogSigned:
    if x.sign == 0 or y.sign == 0:
        return LogSigned.zero()
    with mp.extraprec(GUARD_BITS):
        return LogSigned(x.sign * y.sign, x.logmag + y.logmag)


def logsigned_sum(terms: Iterable[LogSigned]) -> LogSigned:
    """Signed log-sum-exp.

    Terms are shifted by the largest log-magnitude before exponentiating, so
    nothing overflows. Accumulation carries guard bits, which makes the result
    independent of term order to well below one ulp. A result whose magnitude
    is below one unit in the last place of the largest term is treated as
    exact cancellation.
    """
    terms = [t for t in terms if t.sign != 0]
    if not terms:
        return LogSigned.zero()
    eps = mp.eps
    with mp.extraprec(GUARD_BITS + len(terms).bit_length()):
        top = max(t.logmag for t in terms)
        acc = mp.zero
        absacc = mp.zero
        for t in terms:
            v = mp.exp(t.logmag - top)
            acc += t.sign * v
            absacc += v
        if acc == 0 or abs(acc) <= eps * absacc:
            return LogSigned.zero()
        return LogSigned(1 if acc > 0 else -1, mp.log(abs(acc)) + top)


# ---------------------------------------------------------------------------
# spectra


class Spectrum:
    """Strictly increasing eigenvalue sequence indexed by signed integers.

    ``upper_growth = (beta, gamma)`` certifies ``|lambda_j| <= beta*|j| + gamma``;
    ``growth_hint = (alpha, j0)`` records ``|lambda_j| >= alpha*|j|`` for
    ``|j| >= j0``. Finite tables carry neither and stop at their range.
    """

    kind: str = "abstract"
    index_range: Optional[tuple[int, int]] = None
    upper_growth: Optional[tuple] = None
    growth_hint: Optional[tuple] = None

    def eval(self, j: int):
        raise NotImplementedError

    def __call__(self, j: int):
        return self.eval(j)

    def contains(self, j: int) -> bool:
        if self.index_range is None:
            return True
        lo, hi = self.index_range
        return lo <= j <= hi

    def check_monotone(self, lo: int, hi: int) -> bool:
        vals = [self.eval(j) for j in range(lo, hi + 1)]
        return all(a < b for a, b in zip(vals, vals[1:]))

    def is_integer_line(self) -> bool:
        return False


@dataclass(frozen=True)
class IntegerLine(Spectrum):
    kind = "integer-line"
    upper_growth = (1, 0)
    growth_hint = (1, 0)

    def eval(self, j):
        return mp.mpf(int(j))

    def is_integer_line(self):
        return True


@dataclass(frozen=True)
class AffineInteger(Spectrum):
    """lambda_j = a*j + b with a > 0."""

    a: object = 1
    b: object = 0
    kind = "affine"

    def __post_init__(self):
        if mp.mpf(self.a) <= 0:
            raise SpecError("affine spectrum needs a > 0 for strict monotonicity")

    def eval(self, j):
        return to_mpf(self.a) * int(j) + to_mpf(self.b)

    @property
    def upper_growth(self):
        return (abs(to_mpf(self.a)), abs(to_mpf(self.b)))

    @property
    def growth_hint(self):
        a, b = to_mpf(self.a), abs(to_mpf(self.b))
        return (a / 2, int(mp.ceil(2 * b / a)))


@dataclass(frozen=True)
class ExplicitTable(Spectrum):
    """Eigenvalues lambda_{-J}..lambda_J listed in order."""

    values: tuple = ()
    kind = "table"

    def __post_init__(self):
        if len(self.values) % 2 != 1:
            raise SpecError("table spectrum needs an odd number (2J+1) of values")
        vals = [to_mpf(v) for v in self.values]
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise SpecError("table spectrum must be strictly increasing")
        object.__setattr__(self, "_vals", tuple(vals))

    @property
    def J(self) -> int:
        return len(self.values) // 2

    @property
    def index_range(self):
        return (-self.J, self.J)

    def eval(self, j):
        j = int(j)
        if abs(j) > self.J:
            raise IndexOutOfTable(f"index {j} outside table range [-{self.J}, {self.J}]")
        return +self._vals[j + self.J]


@dataclass(frozen=True)
class RelabeledSpectrum(Spectrum):
    """lambda~_s = lambda_{m(s)} for an increasing index map m."""

    base: Spectrum = None
    index_map: Callable = None
    extra_offset: int = 0  # |m(s)| <= |s| + extra_offset
    index_range: Optional[tuple] = None
    kind = "relabeled"

    def eval(self, s):
        if self.index_range is not None and not (self.index_range[0] <= s <= self.index_range[1]):
            raise IndexOutOfTable(f"relabeled index {s} outside {self.index_range}")
        return self.base.eval(self.index_map(s))

    @property
    def upper_growth(self):
        if self.base.upper_growth is None:
            return None
        beta, gamma = self.base.upper_growth
        return (beta, beta * self.extra_offset + gamma)


def spectrum_eval(spec: Spectrum, j: int):
    return spec.eval(j)


@dataclass(frozen=True)
class Window:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("window parameter n must be nonnegative")

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    @property
    def indices(self) -> range:
        return range(-self.n, self.n + 1)

    def position(self, i: int) -> int:
        return i + self.n


# ---------------------------------------------------------------------------
# coefficient sequences


class CoefficientSequence:
    """Coefficients c_j = (f, e_j) with a decay certificate.

    Subclasses provide ``eval``; infinite sequences also give ``envelope(m)``
    (an upper bound on ``|c_j|`` for ``|j| = m >= env_start``) and
    ``envelope_ratio(m)`` bounding ``envelope(m'+1)/envelope(m')`` for every
    ``m' >= m``. Finite sequences report ``support()``; the terms outside are
    exactly zero.
    """

    kind: str = "abstract"
    tail_assumed_zero: bool = False
    env_start: int = 0

    def eval(self, j: int):
        raise NotImplementedError

    def __call__(self, j):
        return self.eval(j)

    def abs(self, j):
        return abs(self.eval(j))

    def abs2(self, j):
        v = self.abs(j)
        return v * v

    def support(self) -> Optional[tuple[int, int]]:
        return None

    def envelope(self, m: int):
        return None

    def envelope_ratio(self, m: int):
        return None

    def is_zero(self, j) -> bool:
        return self.eval(j) == 0

    def check_envelope(self, lo: int, hi: int) -> bool:
        for j in range(lo, hi + 1):
            if abs(j) >= self.env_start and self.envelope(abs(j)) is not None:
                if self.abs(j) > self.envelope(abs(j)) * (1 + 8 * mp.eps):
                    return False
        return True


def _zigzag(j: int) -> int:
    return 2 * j if j >= 0 else -2 * j - 1


def _phase_fraction(seed: int, j: int) -> float:
    return float(np.random.default_rng([seed, _zigzag(j)]).random())


@dataclass(frozen=True)
class TableCoefficients(CoefficientSequence):
    """Finitely many coefficients; ``values[i]`` is c_{offset+i}, zero elsewhere."""

    values: tuple = ()
    offset: int = 0
    tail_assumed_zero: bool = True
    kind = "table"

    def __post_init__(self):
        object.__setattr__(self, "_vals", tuple(to_mpc(v) for v in self.values))
        object.__setattr__(self, "_real", all(mp.im(v) == 0 for v in self._vals))

    @classmethod
    def centered(cls, values: Sequence, **kw) -> "TableCoefficients":
        if len(values) % 2 != 1:
            raise SpecError("centered coefficient table needs 2J+1 entries")
        return cls(values=tuple(values), offset=-(len(values) // 2), **kw)

    @classmethod
    def from_dict(cls, mapping: dict, **kw) -> "TableCoefficients":
        lo, hi = min(mapping), max(mapping)
        vals = [mapping.get(j, 0) for j in range(lo, hi + 1)]
        return cls(values=tuple(vals), offset=lo, **kw)

    def support(self):
        nz = [i for i, v in enumerate(self._vals) if v != 0]
        if not nz:
            return (0, -1)
        return (self.offset + nz[0], self.offset + nz[-1])

    def eval(self, j):
        i = int(j) - self.offset
        if 0 <= i < len(self._vals):
            v = self._vals[i]
            return +mp.re(v) if self._real else +v
        return mp.zero


@dataclass(frozen=True)
class GeometricCoefficients(CoefficientSequence):
    """c_j = scale * ratio**|j| * exp(2*pi*i*u_j), with u_j a seeded phase
    (omitted when ``phase_seed`` is None)."""

    ratio: object = 0.5
    scale: object = 1
    phase_seed: Optional[int] = None
    kind = "geometric"

    def __post_init__(self):
        r = to_mpf(self.ratio)
        if not (0 < r):
            raise SpecError("geometric ratio must be positive")
        if to_mpc(self.scale) == 0:
            raise SpecError("geometric scale must be nonzero")

    def abs(self, j):
        return abs(to_mpc(self.scale)) * to_mpf(self.ratio) ** abs(int(j))

    def abs2(self, j):
        s = to_mpc(self.scale)
        return (mp.re(s) ** 2 + mp.im(s) ** 2) * to_mpf(self.ratio) ** (2 * abs(int(j)))

    def eval(self, j):
        j = int(j)
        mag = to_mpf(self.ratio) ** abs(j)
        s = to_mpc(self.scale)
        if self.phase_seed is None:
            return s * mag if mp.im(s) != 0 else mp.re(s) * mag
        return s * mag * mp.expjpi(2 * mp.mpf(_phase_fraction(self.phase_seed, j)))

    def envelope(self, m):
        return self.abs(m)

    def envelope_ratio(self, m):
        return to_mpf(self.ratio)


@dataclass(frozen=True)
class CustomCoefficients(CoefficientSequence):
    func: Callable = None
    envelope_func: Optional[Callable] = None
    ratio_func: Optional[Callable] = None
    env_start: int = 0
    kind = "custom"

    def eval(self, j):
        return self.func(int(j))

    def envelope(self, m):
        return None if self.envelope_func is None else self.envelope_func(m)

    def envelope_ratio(self, m):
        return None if self.ratio_func is None else self.ratio_func(m)


@dataclass(frozen=True)
class MaskedCoefficients(CoefficientSequence):
    """A base sequence with finitely many coefficients forced to zero."""

    base: CoefficientSequence = None
    zero_indices: frozenset = frozenset()
    kind = "masked"

    @property
    def env_start(self):
        return self.base.env_start

    @property
    def tail_assumed_zero(self):
        return self.base.tail_assumed_zero

    def eval(self, j):
        return mp.zero if int(j) in self.zero_indices else self.base.eval(j)

    def abs(self, j):
        return mp.zero if int(j) in self.zero_indices else self.base.abs(j)

    def abs2(self, j):
        return mp.zero if int(j) in self.zero_indices else self.base.abs2(j)

    def support(self):
        return self.base.support()

    def envelope(self, m):
        return self.base.envelope(m)

    def envelope_ratio(self, m):
        return self.base.envelope_ratio(m)


@dataclass(frozen=True)
class ScaledCoefficients(CoefficientSequence):
    """alpha * base."""

    base: CoefficientSequence = None
    alpha: object = 1
    kind = "scaled"

    @property
    def env_start(self):
        return self.base.env_start

    @property
    def tail_assumed_zero(self):
        return self.base.tail_assumed_zero

    def eval(self, j):
        return to_mpc(self.alpha) * self.base.eval(j)

    def abs(self, j):
        return abs(to_mpc(self.alpha)) * self.base.abs(j)

    def abs2(self, j):
        a = to_mpc(self.alpha)
        return (mp.re(a) ** 2 + mp.im(a) ** 2) * self.base.abs2(j)

    def support(self):
        return self.base.support()

    def envelope(self, m):
        e = self.base.envelope(m)
        return None if e is None else abs(to_mpc(self.alpha)) * e

    def envelope_ratio(self, m):
        return self.base.envelope_ratio(m)


@dataclass(frozen=True)
class RelabeledCoefficients(CoefficientSequence):
    """c~_s = c_{m(s)}; the envelope of the base carries over because
    |m(s)| >= |s| and base envelopes are nonincreasing in |j|."""

    base: CoefficientSequence = None
    index_map: Callable = None
    index_range: Optional[tuple] = None
    kind = "relabeled"

    @property
    def env_start(self):
        return self.base.env_start

    @property
    def tail_assumed_zero(self):
        return self.base.tail_assumed_zero

    def _m(self, s):
        if self.index_range is not None and not (self.index_range[0] <= s <= self.index_range[1]):
            return None
        return self.index_map(s)

    def eval(self, s):
        m = self._m(s)
        return mp.zero if m is None else self.base.eval(m)

    def abs(self, s):
        m = self._m(s)
        return mp.zero if m is None else self.base.abs(m)

    def abs2(self, s):
        m = self._m(s)
        return mp.zero if m is None else self.base.abs2(m)

    def support(self):
        return self.index_range

    def envelope(self, m):
        return self.base.envelope(m)

    def envelope_ratio(self, m):
        return self.base.envelope_ratio(m)


def summation_range(spectrum: Spectrum, coeffs: CoefficientSequence):
    """Index range over which series terms can be nonzero; None means all of Z."""
    ranges = [r for r in (spectrum.index_range, coeffs.support()) if r is not None]
    if not ranges:
        return None
    lo = max(r[0] for r in ranges)
    hi = min(r[1] for r in ranges)
    return (lo, hi)


def is_finite_problem(spectrum: Spectrum, coeffs: CoefficientSequence) -> bool:
    return summation_range(spectrum, coeffs) is not None


def log_factorial(k: int):
    """ln(k!) at working precision; exact integer product for small k."""
    if k <= 20:
        return mp.log(math.factorial(k))
    return mp.loggamma(k + 1)
