"""
Two independent routes to the projection distance
=================================================

rho^2(e_k, span{f, Af, ..., A^{2n} f}) from

  * the K matrix: 1 - <(E + K)^{-1} e_k, e_k>, K built from tail sums, and
  * the Gram matrix of f, Af, ...: 1 - <A^{-1} b, b>, solved with mpmath LU.

The two share no algebra, so agreement is a real check.
"""
from mpmath import mp

from cyclicvec import (
    ExplicitTable,
    GeometricCoefficients,
    IntegerLine,
    NodalContext,
    PrecisionConfig,
    build_K,
    build_gram,
    criterion_value,
    rho2_via_gram,
    rho2_via_gram_determinant,
)

cfg = PrecisionConfig()
mp.prec = cfg.mantissa_bits

f = GeometricCoefficients(ratio=0.5, phase_seed=1)   # |(f, e_s)| = 2^-|s|, random phases
spectra = {
    "integer line": IntegerLine(),
    "irregular table": ExplicitTable(values=tuple(j + 0.1 * j**3 / 25 for j in range(-12, 13))),
}

for name, spec in spectra.items():
    print(f"\n{name}")
    print(f"{'n':>3} {'k':>3} {'K route':>28} {'Gram route':>28} {'|diff|':>10}")
    for n in (2, 3, 4):
        K = build_K(NodalContext.build(spec, n, cfg), f, cfg)
        gs = build_gram(spec, f, n, cfg.for_gram())
        for k in (0, 1):
            a = criterion_value(K, k, cfg).rho2
            b = rho2_via_gram(gs, k, cfg)
            print(f"{n:>3} {k:>3} {mp.nstr(a, 25):>28} {mp.nstr(b, 25):>28} {mp.nstr(abs(a - b), 3):>10}")

# the Gram determinant ratio is a third way to the same number
gs = build_gram(IntegerLine(), f, 3, cfg.for_gram())
print("\nGram determinant ratio, n=3, k=0:", mp.nstr(rho2_via_gram_determinant(gs, 0, cfg), 25))
