from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from cyclicvec import (
    AffineInteger,
    CustomCoefficients,
    ExplicitTable,
    GeometricCoefficients,
    IntegerLine,
    NodalContext,
    PrecisionConfig,
    TableCoefficients,
    gram_entry_series,
    tail_sum_kij,
)
from cyclicvec.errors import DivergentTail, IndexOutOfWindow
from cyclicvec.tail_series import tail_sum_matrix

from oracles import geometric_moment, tail_sum_geometric

CFG = PrecisionConfig()


def frac_to_mpf(f):
    with CFG.workprec():
        return mp.mpf(f.numerator) / f.denominator


def rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a)


def test_diagonal_example_against_rational_oracle():
    ref = tail_sum_geometric(1, 0, 0, Fraction(1, 2))
    # 2 * sum_{s>=2} (s^2-1)^2 4^-s, closed form 574/81
    assert abs(ref - Fraction(574, 81)) < Fraction(1, 10**60)
    ctx = NodalContext.build(IntegerLine(), 1, CFG)
    r = tail_sum_kij(ctx, GeometricCoefficients(ratio=0.5), 0, 0, CFG)
    with CFG.workprec():
        assert r.value.sign == 1
        assert rel(r.real, frac_to_mpf(ref)) <= mp.mpf("1e-25")
        assert r.truncation_bound <= mp.mpf(CFG.tail_rel_tol) * r.real


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("ratio", [Fraction(1, 2), Fraction(1, 4)])
def test_all_entries_against_rational_oracle(n, ratio):
    ctx = NodalContext.build(IntegerLine(), n, CFG)
    coeffs = GeometricCoefficients(ratio=float(ratio))
    for i in range(-n, n + 1):
        for j in range(i, n + 1, max(1, n // 2)):
            ref = frac_to_mpf(tail_sum_geometric(n, i, j, ratio))
            got = tail_sum_kij(ctx, coeffs, i, j, CFG)
            with CFG.workprec():
                assert rel(got.real, ref) <= mp.mpf("1e-25"), (i, j)


def test_off_diagonal_mixed_signs():
    ref = tail_sum_geometric(1, 0, 1, Fraction(1, 2))
    ctx = NodalContext.build(IntegerLine(), 1, CFG)
    r = tail_sum_kij(ctx, GeometricCoefficients(ratio=0.5), 0, 1, CFG)
    with CFG.workprec():
        assert rel(r.real, frac_to_mpf(ref)) <= mp.mpf("1e-25")


def test_matrix_pass_matches_single_entries():
    ctx = NodalContext.build(IntegerLine(), 2, CFG)
    c = GeometricCoefficients(ratio=0.6, phase_seed=5)
    tm = tail_sum_matrix(ctx, c, CFG)
    with CFG.workprec():
        for a, i in enumerate(range(-2, 3)):
            for b, j in enumerate(range(-2, 3)):
                single = tail_sum_kij(ctx, c, i, j, CFG).real
                assert rel(tm.sums[a][b], single) <= mp.mpf("1e-25")


def test_finite_support_inside_window():
    ctx = NodalContext.build(IntegerLine(), 2, CFG)
    c = TableCoefficients.centered([1, 2, 3])
    r = tail_sum_kij(ctx, c, 0, 1, CFG)
    assert r.value.sign == 0 and r.truncation_bound == 0


def test_finite_support_is_exact():
    ctx = NodalContext.build(IntegerLine(), 1, CFG)
    c = TableCoefficients.centered([1, 1, 1, 1, 1])  # c_{+-2} = 1 outside
    r = tail_sum_kij(ctx, c, 0, 0, CFG)
    # two terms: P(+-2)^2 / 4 = 36 / 4
    assert r.real == 18 and r.truncation_bound == 0


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    st.floats(min_value=0.1, max_value=0.85),
    st.integers(min_value=0, max_value=1000),
    st.data(),
)
def test_hermitian_and_diagonal_positive(n, ratio, seed, data):
    ctx = NodalContext.build(AffineInteger(a=1.25, b=0.5), n, CFG)
    c = GeometricCoefficients(ratio=ratio, phase_seed=seed)
    i = data.draw(st.integers(-n, n))
    j = data.draw(st.integers(-n, n))
    a = tail_sum_kij(ctx, c, i, j, CFG)
    b = tail_sum_kij(ctx, c, j, i, CFG)
    with CFG.workprec():
        assert abs(a.real - b.real) <= 2 * mp.eps * abs(a.real)
    d = tail_sum_kij(ctx, c, i, i, CFG)
    assert d.value.sign in (0, 1)


def test_truncation_bound_monotone():
    ctx = NodalContext.build(IntegerLine(), 2, CFG)
    c = GeometricCoefficients(ratio=0.7)
    prev_terms, prev_bound = 0, None
    for tol in (1e-5, 1e-10, 1e-20, 1e-30, 1e-40):
        cfg = PrecisionConfig(tail_rel_tol=tol)
        r = tail_sum_kij(ctx, c, 0, 1, cfg)
        assert r.terms_used >= prev_terms
        if prev_bound is not None:
            assert r.truncation_bound <= prev_bound
        prev_terms, prev_bound = r.terms_used, r.truncation_bound


def test_divergent_envelope_rejected():
    ctx = NodalContext.build(IntegerLine(), 1, CFG)
    with pytest.raises(DivergentTail):
        tail_sum_kij(ctx, GeometricCoefficients(ratio=1.0), 0, 0, CFG)
    slow = CustomCoefficients(func=lambda j: mp.mpf(1) / (1 + j * j))
    with pytest.raises(DivergentTail):
        tail_sum_kij(ctx, slow, 0, 0, CFG)


def test_index_outside_window():
    ctx = NodalContext.build(IntegerLine(), 1, CFG)
    with pytest.raises(IndexOutOfWindow):
        tail_sum_kij(ctx, GeometricCoefficients(), 2, 0, CFG)


def test_table_spectrum_finite_sum():
    spec = ExplicitTable(values=(-3, -1, 0, 0.5, 4))
    ctx = NodalContext.build(spec, 1, CFG)
    c = GeometricCoefficients(ratio=0.5)  # only indices -2..2 exist
    r = tail_sum_kij(ctx, c, 0, 0, CFG)
    with CFG.workprec():
        expected = mp.zero
        for s in (-2, 2):
            lam = spec.eval(s)
            P = (lam + 1) * lam * (lam - mp.mpf(0.5))
            expected += P**2 * mp.mpf(0.25) ** 2 / lam**2
        assert rel(r.real, expected) <= mp.mpf("1e-70")
        assert r.truncation_bound == 0


# -- moments -------------------------------------------------------------------

@pytest.mark.parametrize(
    "p,coeffs,expected",
    [
        (0, TableCoefficients.centered([1]), Fraction(1)),
        (1, GeometricCoefficients(ratio=0.5), Fraction(0)),
        (2, GeometricCoefficients(ratio=0.5), Fraction(40, 27)),
    ],
)
def test_moment_examples(p, coeffs, expected):
    if isinstance(coeffs, GeometricCoefficients):
        assert abs(geometric_moment(p, Fraction(1, 2)) - expected) < Fraction(1, 10**60)
    r = gram_entry_series(IntegerLine(), coeffs, p, CFG)
    with CFG.workprec():
        if expected == 0:
            assert abs(r.real) <= mp.mpf("1e-60")
        else:
            assert rel(r.real, frac_to_mpf(expected)) <= mp.mpf("1e-28")


@pytest.mark.parametrize("p", [3, 6, 11, 16, 20])
def test_moments_against_oracle(p):
    ref = frac_to_mpf(geometric_moment(p, Fraction(1, 4)))
    r = gram_entry_series(IntegerLine(), GeometricCoefficients(ratio=0.25), p, CFG)
    with CFG.workprec():
        if ref == 0:
            assert abs(r.real) <= r.truncation_bound + mp.mpf("1e-60")
        else:
            assert rel(r.real, ref) <= mp.mpf("1e-28")
