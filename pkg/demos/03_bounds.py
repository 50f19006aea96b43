"""
Diagonal bounds on rho^2
========================

Only the diagonal of K is needed for the first bound
rho^2 <= k_kk / (1 + k_kk); the refined bound also uses column k.
For a diagonal K the first bound is attained. With slow coefficient decay
k_kk is huge and both bounds say nothing (they sit at 1); they only become
useful once the tail is small relative to the window.
"""
from mpmath import mp

from cyclicvec import (
    GeometricCoefficients,
    IntegerLine,
    KMatrix,
    NodalContext,
    PrecisionConfig,
    build_K,
    criterion_value,
    refined_bound,
    theorem2_bound,
)

cfg = PrecisionConfig()
mp.prec = cfg.mantissa_bits

for ratio in (0.3, 0.6, 0.8):
    f = GeometricCoefficients(ratio=ratio, phase_seed=4)
    print(f"\nratio {ratio}")
    print(f"{'n':>3} {'rho2':>14} {'refined':>14} {'k/(1+k)':>14}")
    for n in range(2, 7):
        K = build_K(NodalContext.build(IntegerLine(), n, cfg), f, cfg)
        rep = criterion_value(K, 0, cfg)
        print(f"{n:>3} {mp.nstr(rep.rho2, 8):>14} {mp.nstr(rep.bound_refined, 8):>14} {mp.nstr(rep.bound_t2, 8):>14}")

# equality case
K = KMatrix(1, [[mp.mpf(2), 0, 0], [0, mp.mpf(3), 0], [0, 0, mp.mpf(5)]], mp.zero)
rep = criterion_value(K, 0, cfg)
print("\ndiagonal K, k_00 = 3:  rho2 =", mp.nstr(rep.rho2, 30), " bound =", mp.nstr(theorem2_bound(K, 0), 30))
print("refined bound          =", mp.nstr(refined_bound(K, 0), 30))
