"""
Bump functions are not cyclic
=============================

A smooth function with compact support inside (-pi, pi) has a Fourier
transform with real zeros. At such a zero lambda_0 the function
exp(i lambda_0 x) is orthogonal to phi and to all its derivatives, so the
derivative system cannot be dense. Numerically, rho^2(e_0, ...) stays away
from zero while the same sweep for e^{cos x} collapses.
"""
from mpmath import mp

from cyclicvec import PrecisionConfig, bump_noncyclicity_demo

cfg = PrecisionConfig()
mp.prec = cfg.mantissa_bits

rep = bump_noncyclicity_demo(nmax=8, cfg=cfg)
print("support radius      ", mp.nstr(rep.radius, 10))
print("zero of transform   ", mp.nstr(rep.lambda0, 20))
print("|Phi(lambda0)|      ", mp.nstr(abs(rep.phi_at_lambda0), 3))
print("quadrature aliasing ", mp.nstr(rep.aliasing_estimate, 3))
print(f"\n{'n':>3} {'bump':>16} {'e^cos x':>16}")
for n in sorted(rep.rho2_by_n):
    print(f"{n:>3} {mp.nstr(rep.rho2_by_n[n], 8):>16} {mp.nstr(rep.contrast_rho2_by_n[n], 8):>16}")
