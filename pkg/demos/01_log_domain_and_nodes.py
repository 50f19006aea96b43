"""
Log-domain numbers and the nodal polynomial
===========================================

Nodal-polynomial values grow like factorials, far past the double range.
Everything is carried as (sign, log|x|) pairs.
"""
from mpmath import mp

from cyclicvec import IntegerLine, LogSigned, NodalContext, PrecisionConfig, eval_P, lagrange_weight, logsigned_sum
from cyclicvec.nodal_poly import eval_Pdot_at_node, eval_Pdot_generic

cfg = PrecisionConfig()  # 256-bit mantissas
mp.prec = cfg.mantissa_bits

# products just add logs, so e^700 * e^700 is fine
big = LogSigned(1, 700) * LogSigned(1, 700)
print("e^700 * e^700 =", mp.nstr(big.to_value(), 10))

# sums shift by the largest term first; exact cancellation gives sign 0
print("5 - 2        =", logsigned_sum([LogSigned.from_value(5), LogSigned.from_value(-2)]).to_value())
print("1 - 1 sign   =", logsigned_sum([LogSigned.from_value(1), LogSigned.from_value(-1)]).sign)

# P(lambda) = prod (lambda - lambda_i) over the window -n..n
ctx = NodalContext.build(IntegerLine(), 2, cfg)
print("P_5(10)      =", mp.nint(eval_P(ctx, 10).to_value()), "(10*99*96)")

# on the integer line P' at node i is (-1)^(n-i) (n+i)! (n-i)!
n = 40
ctx = NodalContext.build(IntegerLine(), n, cfg)
for i in (-n, 0, 7, n):
    fast = eval_Pdot_at_node(ctx, i)
    slow = eval_Pdot_generic(ctx, i)
    print(f"P'({i:>3}) sign {fast.sign:+d}  log|.| {mp.nstr(fast.logmag, 20)}  product path agrees: "
          f"{abs(fast.logmag - slow.logmag) < 1e-60}")

# Lagrange weights sum to one away from the nodes
ctx = NodalContext.build(IntegerLine(), 6, cfg)
mu = mp.mpf("3.3")
total = logsigned_sum([lagrange_weight(ctx, i, mu) for i in range(-6, 7)])
print("sum of Lagrange weights at 3.3 =", mp.nstr(total.to_value(), 40))
