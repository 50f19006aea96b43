"""
Vanishing coefficients
======================

If (f, e_k) = 0 then e_k is orthogonal to every A^l f: rho^2 = 1 for every n.
Other zeros are removed by renumbering the surviving eigenvalues in order,
after which the K route applies unchanged.
"""
from mpmath import mp

from cyclicvec import (
    GeometricCoefficients,
    IntegerLine,
    MaskedCoefficients,
    PrecisionConfig,
    analyze,
    build_gram,
    relabel_support,
    rho2_via_gram,
)

cfg = PrecisionConfig()
mp.prec = cfg.mantissa_bits

f = MaskedCoefficients(base=GeometricCoefficients(ratio=0.5), zero_indices=frozenset({-1, 2}))
rl = relabel_support(f, IntegerLine())
print("relabeled index -> original eigenvalue:")
print({s: int(rl.spectrum.eval(s)) for s in range(-4, 5)})

for k in (0, 2):
    for n in (3, 4):
        rep = analyze(IntegerLine(), f, k, n, cfg)
        gram = rho2_via_gram(build_gram(IntegerLine(), f, n, cfg.for_gram()), k, cfg) if k != 2 else mp.one
        print(f"k={k} n={n}: rho2 = {mp.nstr(rep.rho2, 15)}  (Gram {mp.nstr(gram, 15)})  {rep.note}")
