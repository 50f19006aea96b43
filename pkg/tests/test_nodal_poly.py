from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st
from mpmath import mp

from cyclicvec import ExplicitTable, IntegerLine, NodalContext, PrecisionConfig, eval_P, lagrange_weight
from cyclicvec.errors import NodeCollision
from cyclicvec.nodal_poly import eval_P_integer, eval_Pdot_at_node, eval_Pdot_generic
from cyclicvec.spectral_core import AffineInteger, logsigned_sum

CFG = PrecisionConfig()


def ctx(spectrum, n):
    return NodalContext.build(spectrum, n, CFG)


def exact_P(nodes, x):
    out = Fraction(1)
    for v in nodes:
        out *= Fraction(x) - Fraction(v)
    return out


@pytest.mark.parametrize(
    "n,lam,expected",
    [(1, 3, 24), (2, 10, exact_P(range(-2, 3), 10)), (1, 1, 0)],
)
def test_eval_P_examples(n, lam, expected):
    assert expected != 95040 or n == 2  # 10*99*96
    with CFG.workprec():
        v = eval_P(ctx(IntegerLine(), n), lam)
        if expected == 0:
            assert v.sign == 0
        else:
            assert v.sign == 1
            assert abs(v.to_value() - expected) <= mp.mpf("1e-60") * expected


def test_eval_P_95040():
    assert exact_P(range(-2, 3), 10) == 95040
    with CFG.workprec():
        assert mp.nint(eval_P(ctx(IntegerLine(), 2), 10).to_value()) == 95040


@pytest.mark.parametrize("n,i,expected", [(2, 0, 4), (2, 2, 24), (2, -1, -6), (3, 1, 48)])
def test_pdot_integer(n, i, expected):
    # expected from prod_{j != i} (i - j) in integers
    assert expected == int(exact_P([j for j in range(-n, n + 1) if j != i], i))
    with CFG.workprec():
        assert mp.nint(eval_Pdot_at_node(ctx(IntegerLine(), n), i).to_value()) == expected


def test_pdot_table():
    with CFG.workprec():
        v = eval_Pdot_at_node(ctx(ExplicitTable(values=(-1.5, 0, 2)), 1), 0)
        assert abs(v.to_value() + 3) < mp.mpf("1e-70")


@pytest.mark.parametrize("i,mu,expected", [(0, 2, -3), (1, 2, 3)])
def test_lagrange_examples(i, mu, expected):
    # P(x) = x^3 - x, P'(0) = -1, P'(1) = 2
    nodes = (-1, 0, 1)
    w = exact_P(nodes, mu) / (exact_P([v for v in nodes if v != i], i) * (mu - i))
    assert w == expected
    with CFG.workprec():
        assert abs(lagrange_weight(ctx(IntegerLine(), 1), i, mu).to_value() - expected) < mp.mpf("1e-70")


def test_lagrange_collision():
    with pytest.raises(NodeCollision):
        lagrange_weight(ctx(IntegerLine(), 1), 0, 1)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=6),
    st.floats(min_value=-30, max_value=30, allow_nan=False),
    st.sampled_from(["integer", "affine", "table"]),
)
def test_partition_of_unity(n, mu, kind):
    spec = {
        "integer": IntegerLine(),
        "affine": AffineInteger(a=1.5, b=-0.25),
        "table": ExplicitTable(values=tuple(j * j * 0.05 + j for j in range(-8, 9))),
    }[kind]
    c = ctx(spec, n)
    with CFG.workprec():
        mu = mp.mpf(mu)
        assume(all(abs(mu - x) > 1e-6 for x in c.nodes))
        total = logsigned_sum([lagrange_weight(c, i, mu) for i in range(-n, n + 1)])
        scale = sum(abs(lagrange_weight(c, i, mu).to_value()) for i in range(-n, n + 1))
        assert abs(total.to_value() - 1) <= mp.mpf("1e-25") * max(1, scale)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 30, 50])
def test_factorial_matches_product(n):
    c = ctx(IntegerLine(), n)
    with CFG.workprec():
        for i in range(-n, n + 1):
            a = eval_Pdot_at_node(c, i)
            b = eval_Pdot_generic(c, i)
            assert a.sign == b.sign
            assert abs(mp.exp(a.logmag - b.logmag) - 1) <= mp.mpf("1e-30")


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.lists(st.floats(0.05, 3), min_size=17, max_size=17))
def test_pdot_sign_alternates(n, gaps):
    vals, x = [], -10.0
    for g in gaps:
        x += g
        vals.append(x)
    c = ctx(ExplicitTable(values=tuple(vals)), n)
    for i in range(-n, n + 1):
        assert eval_Pdot_at_node(c, i).sign == (-1) ** (n - i)


@pytest.mark.parametrize("n,s", [(1, 2), (2, 3), (3, -7), (4, 11)])
def test_integer_fast_path(n, s):
    with CFG.workprec():
        assert abs(eval_P_integer(n, s).to_value() - exact_P(range(-n, n + 1), s)) < mp.mpf("1e-50") * abs(
            exact_P(range(-n, n + 1), s)
        )
