"""Exact rational reference computations used as test oracles."""
from fractions import Fraction


def P_int(n: int, s: int) -> int:
    out = 1
    for i in range(-n, n + 1):
        out *= s - i
    return out


def pdot_int(n: int, i: int) -> int:
    out = 1
    for j in range(-n, n + 1):
        if j != i:
            out *= i - j
    return out


def tail_sum_geometric(n: int, i: int, j: int, ratio: Fraction, smax: int = 400) -> Fraction:
    """sum_{n < |s| <= smax} P(s)^2 ratio^(2|s|) / ((s-i)(s-j)) on the integer line."""
    r2 = ratio * ratio
    total = Fraction(0)
    w = r2 ** n
    for m in range(n + 1, smax + 1):
        w *= r2
        for s in (m, -m):
            total += Fraction(P_int(n, s) ** 2, (s - i) * (s - j)) * w
    return total


def geometric_moment(p: int, ratio: Fraction, smax: int = 400) -> Fraction:
    r2 = ratio * ratio
    total = Fraction(0 ** p)
    w = Fraction(1)
    for m in range(1, smax + 1):
        w *= r2
        total += (m ** p + (-m) ** p) * w
    return total
