"""
e^{a cos x} and the derivative system
=====================================

For A = i d/dx on L2(-pi, pi), span{f, f', f'', ...} is dense when the Fourier
coefficients of f never vanish and decay faster than e^{-sigma |k|}.
e^{cos x} has coefficients sqrt(2 pi) I_k(1), which decay like 2^-k / k!.
"""
from mpmath import mp

from cyclicvec import (
    IntegerLine,
    PrecisionConfig,
    analyze,
    expcos_coefficients,
    solve_c0,
    theorem3_check,
    theorem3_tail_quantity,
)

cfg = PrecisionConfig()
mp.prec = cfg.mantissa_bits

t = solve_c0(cfg)
print("c0    =", mp.nstr(t.c0, 20), "  (root of c^2 = e^{1/c^2})")
print("sigma =", mp.nstr(t.sigma, 20))

f = expcos_coefficients(1)
rep = theorem3_check(f, 20, cfg)
print(f"\nfitted decay delta = {mp.nstr(rep.delta, 6)}, C = {mp.nstr(rep.C, 6)}")
print("verdict:", rep.verdict)

print(f"\n{'n':>3} {'tail quantity k=0':>22} {'rho2(e_0)':>22}")
for n in range(4, 13):
    q = theorem3_tail_quantity(0, n, f, cfg)
    r = analyze(IntegerLine(), f, 0, n, cfg).rho2
    print(f"{n:>3} {mp.nstr(q, 10):>22} {mp.nstr(r, 10):>22}")
