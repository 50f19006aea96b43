"""Acceptance criteria 1-10.

Each test records its outcome in ``conftest.ACCEPTANCE``; the terminal summary
prints one PASS/FAIL line per criterion. Tolerances are the pinned ones.
"""
import contextlib
import io
import json
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from mpmath import mp

from cyclicvec import (
    AffineInteger,
    ExplicitTable,
    GeometricCoefficients,
    IntegerLine,
    NodalContext,
    PrecisionConfig,
    TableCoefficients,
    build_K,
    build_gram,
    criterion_value,
    expcos_coefficients,
    kantorovich_check,
    refined_bound,
    rho2_via_gram,
    solve_c0,
    theorem2_bound,
    theorem3_check,
    theorem3_tail_quantity,
    verify_B_factorization,
)
from cyclicvec.cli import main
from cyclicvec.cyclicity import KMatrix
from cyclicvec.derivative_app import bump_noncyclicity_demo, nodal_exponential_bound, tail_maximizer
from cyclicvec.gram_oracle import gram_solve

from conftest import ACCEPTANCE

FIXTURES = Path(__file__).parent / "fixtures"
BITS = 256
CFG = PrecisionConfig(mantissa_bits=BITS, gram_mantissa_bits=BITS)
BOUND_SLACK = mp.mpf("1e-15")


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 1. constants

def test_criterion_01_constants():
    buf = io.StringIO()
    t0 = time.perf_counter()
    with contextlib.redirect_stdout(buf):
        code = main(["constants"])
    elapsed = time.perf_counter() - t0
    vals = {k.strip(): v.strip() for k, v in (line.split("=") for line in buf.getvalue().splitlines())}
    c0, sigma = mp.mpf(vals["c0"]), mp.mpf(vals["sigma"])
    res = abs(solve_c0(CFG).residual)
    ok = (
        code == 0
        and abs(c0 - mp.mpf("1.328")) <= mp.mpf("5e-4")
        and abs(sigma - mp.mpf("1.79")) <= mp.mpf("5e-3")
        and res <= mp.mpf("1e-30")
        and elapsed < 1.0
    )
    record(1, ok, f"c0={mp.nstr(c0, 8)} sigma={mp.nstr(sigma, 8)} residual={mp.nstr(res, 3)} t={elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 2 + 3. route equivalence and bound chain on random instances

def _random_instances(count=110, seed=20240607):
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(count):
        n = int(rng.integers(2, 6))
        ratio = round(float(rng.uniform(0.2, 0.8)), 6)
        coeffs = GeometricCoefficients(ratio=ratio, phase_seed=int(rng.integers(0, 2**31)))
        if idx % 2 == 0:
            spectrum = IntegerLine()
        else:
            J = n + int(rng.integers(2, 12))
            gaps = rng.uniform(0.3, 2.0, size=2 * J)
            vals = np.concatenate([[0.0], np.cumsum(gaps)])
            vals = vals - vals[J] + float(rng.uniform(-0.5, 0.5))
            spectrum = ExplicitTable(values=tuple(round(float(v), 9) for v in vals))
        out.append((spectrum, coeffs, n))
    return out


@pytest.fixture(scope="module")
def route_runs():
    t0 = time.perf_counter()
    rows = []
    for spectrum, coeffs, n in _random_instances():
        K = build_K(NodalContext.build(spectrum, n, CFG), coeffs, CFG)
        gs = build_gram(spectrum, coeffs, n, CFG)
        for k in range(-n + 1, n):
            rep = criterion_value(K, k, CFG)
            rows.append((spectrum, n, k, rep, gram_solve(gs, k, CFG).rho2))
    return rows, time.perf_counter() - t0


def test_criterion_02_route_equivalence(route_runs):
    rows, elapsed = route_runs
    worst = mp.zero
    with mp.workprec(BITS):
        for _, _, _, rep, rho_g in rows:
            scaled = abs(rho_g - rep.rho2) / max(rep.rho2, mp.mpf("1e-6"))
            worst = max(worst, scaled)
    n_inst = len({id(r[0]) for r in rows})
    ok = worst <= mp.mpf("1e-12") and n_inst >= 100 and elapsed < 120
    record(2, ok, f"{n_inst} instances, {len(rows)} (k, n) cells, max scaled gap {mp.nstr(worst, 3)}, t={elapsed:.1f}s")


def test_criterion_03_bound_chain(route_runs):
    rows, _ = route_runs
    bad = 0
    with mp.workprec(BITS):
        for _, _, _, rep, _ in rows:
            if not (rep.rho2 <= rep.bound_refined + BOUND_SLACK <= rep.bound_t2 + BOUND_SLACK):
                bad += 1
    # diagonal K: the Theorem 2 bound is attained
    rng = np.random.default_rng(7)
    worst_eq = mp.zero
    with mp.workprec(BITS):
        for _ in range(50):
            n = int(rng.integers(1, 6))
            diag = [mp.mpf(float(x)) for x in rng.exponential(2.0, size=2 * n + 1)]
            entries = [[diag[a] if a == b else mp.zero for b in range(2 * n + 1)] for a in range(2 * n + 1)]
            K = KMatrix(n, entries, mp.zero)
            for k in range(-n + 1, n):
                rep = criterion_value(K, k, CFG)
                worst_eq = max(worst_eq, abs(rep.rho2 - theorem2_bound(K, k)))
                worst_eq = max(worst_eq, abs(refined_bound(K, k) - theorem2_bound(K, k)))
    ok = bad == 0 and worst_eq <= 16 * mp.eps
    record(3, ok, f"{len(rows)} cells, {bad} chain violations; diagonal-K equality gap {mp.nstr(worst_eq, 3)}")


# ---------------------------------------------------------------------------
# 4. Kantorovich-type inequality

def _householder_matrix(rng, d):
    """M = H D H with H = I - 2 u u^*, |u| = 1; columns of H are eigenvectors."""
    u = [mp.mpc(float(a), float(b)) for a, b in rng.normal(size=(d, 2))]
    norm = mp.sqrt(sum(abs(x) ** 2 for x in u))
    u = [x / norm for x in u]
    D = [mp.mpf(float(x)) for x in rng.uniform(0.01, 100, size=d)]
    H = [[(1 if a == b else 0) - 2 * u[a] * mp.conj(u[b]) for b in range(d)] for a in range(d)]
    HD = [[H[a][b] * D[b] for b in range(d)] for a in range(d)]
    M = [[sum(HD[a][c] * H[c][b] for c in range(d)) for b in range(d)] for a in range(d)]
    M = [[(M[a][b] + mp.conj(M[b][a])) / 2 for b in range(d)] for a in range(d)]
    return M, [[H[a][j] for a in range(d)] for j in range(d)]


def _gram_type_matrix(rng, d):
    B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    C = B @ B.conj().T + 0.1 * np.eye(d)
    C = (C + C.conj().T) / 2
    return [[mp.mpc(C[a, b].real, C[a, b].imag) for b in range(d)] for a in range(d)]


def _unit(rng, d):
    v = [mp.mpc(float(a), float(b)) for a, b in rng.normal(size=(d, 2))]
    norm = mp.sqrt(sum(abs(x) ** 2 for x in v))
    return [x / norm for x in v]


def test_criterion_04_kantorovich():
    rng = np.random.default_rng(11)
    worst_ineq, worst_eq, count = mp.inf, mp.zero, 0
    with mp.workprec(BITS):
        for i in range(1000):
            d = int(rng.integers(1, 21))
            if i % 2:
                M, eig = _householder_matrix(rng, d)
                j = int(rng.integers(0, d))
                worst_eq = max(worst_eq, abs(kantorovich_check(M, eig[j], CFG) - 1))
            else:
                M = _gram_type_matrix(rng, d)
            worst_ineq = min(worst_ineq, kantorovich_check(M, _unit(rng, d), CFG))
            count += 1
        ok = worst_ineq >= 1 - mp.mpf("1e-20") and worst_eq <= mp.mpf("1e-20")
    record(4, ok, f"{count} matrices, min product {mp.nstr(worst_ineq, 10)}, eigenvector gap {mp.nstr(worst_eq, 3)}")


# ---------------------------------------------------------------------------
# 5. Theorem 3 desk-scale reproduction

def test_criterion_05_theorem3():
    t0 = time.perf_counter()
    c = expcos_coefficients(1)
    decreasing, ratios = True, []
    for k in range(-2, 3):
        vals = [theorem3_tail_quantity(k, n, c, CFG) for n in range(4, 13)]
        decreasing &= all(b < a for a, b in zip(vals, vals[1:]))
        ratios.append(vals[-1] / vals[0])
    rep = theorem3_check(c, 20, CFG)
    elapsed = time.perf_counter() - t0
    ok = (
        decreasing
        and max(ratios) <= mp.mpf("1e-3")
        and rep.verdict.startswith("hypothesis satisfied")
        and rep.delta > rep.sigma
        and elapsed < 60
    )
    record(5, ok, f"strictly decreasing={decreasing}, max q12/q4={mp.nstr(max(ratios), 3)}, "
                  f"delta={mp.nstr(rep.delta, 5)} > sigma={mp.nstr(rep.sigma, 5)}, t={elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 6. finite-support exactness

def test_criterion_06_finite_support():
    rng = np.random.default_rng(3)
    worst, cells = mp.zero, 0
    for trial in range(30):
        n = int(rng.integers(1, 6))
        mags = rng.uniform(0.1, 1.0, size=2 * n + 1) * rng.choice([-1, 1], size=2 * n + 1)
        phases = rng.uniform(0, 2 * np.pi, size=2 * n + 1)
        vals = tuple((float(m * np.cos(p)), float(m * np.sin(p))) for m, p in zip(mags, phases))
        # pad with zeros outside the window so the table is wider than the support
        pad = int(rng.integers(0, 4))
        coeffs = TableCoefficients(values=((0,) * pad) + vals + ((0,) * pad), offset=-n - pad)
        kind = trial % 3
        if kind == 0:
            spectrum = IntegerLine()
        elif kind == 1:
            spectrum = AffineInteger(a=float(rng.uniform(0.5, 2)), b=float(rng.uniform(-1, 1)))
        else:
            J = n + pad + 2
            vals_s = np.cumsum(rng.uniform(0.3, 2.0, size=2 * J + 1))
            spectrum = ExplicitTable(values=tuple(float(v - vals_s[J]) for v in vals_s))
        K = build_K(NodalContext.build(spectrum, n, CFG), coeffs, CFG)
        gs = build_gram(spectrum, coeffs, n, CFG)
        for k in range(-n, n + 1):
            worst = max(worst, criterion_value(K, k, CFG).rho2, gram_solve(gs, k, CFG).rho2)
            cells += 1
    record(6, worst <= mp.mpf("1e-25"), f"{cells} (instance, k) cells on both routes, max rho2 {mp.nstr(worst, 3)}")


# ---------------------------------------------------------------------------
# 7. B-factorization

def _exact_deviation(n, jmax, coeff):
    s = 2 * n + 1
    reach = s * jmax + n
    lhs = [[Fraction(0)] * s for _ in range(s)]
    for j in range(-jmax, jmax + 1):
        for m in range(s * j - n, s * j + n + 1):
            for a in range(s):
                for b in range(s):
                    lhs[a][b] += Fraction(m) ** (a + b) * coeff(m) ** 2
    rhs = [[sum(Fraction(m) ** (a + b) * coeff(m) ** 2 for m in range(-reach, reach + 1))
            for b in range(s)] for a in range(s)]
    return max(abs(lhs[a][b] - rhs[a][b]) for a in range(s) for b in range(s))


def test_criterion_07_B_factorization():
    dyadic = lambda m: Fraction(1, 2 ** abs(m))
    third = lambda m: Fraction(3 - (m % 3), 4 + m * m)
    worst = mp.zero
    exact_ok = True
    for n in (1, 2, 3):
        for jmax in (0, 1, 2):
            exact_ok &= _exact_deviation(n, jmax, dyadic) == 0
            reach = (2 * n + 1) * jmax + n
            for coeff in (dyadic, third):
                with mp.workprec(BITS):
                    vals = tuple(mp.mpf(coeff(m).numerator) / coeff(m).denominator for m in range(-reach, reach + 1))
                table = TableCoefficients(values=vals, offset=-reach)
                worst = max(worst, verify_B_factorization(IntegerLine(), table, n, jmax, CFG))
            worst = max(worst, verify_B_factorization(IntegerLine(), GeometricCoefficients(ratio=0.5), n, jmax, CFG))
    record(7, exact_ok and worst <= mp.mpf("1e-25"), f"n<=3, jmax<=2: max deviation {mp.nstr(worst, 3)}, rational identity exact={exact_ok}")


# ---------------------------------------------------------------------------
# 8. bump functions

def test_criterion_08_bump():
    fixture = json.loads((FIXTURES / "bump_floor.json").read_text())
    floor = mp.mpf(fixture["floor"])
    rep = bump_noncyclicity_demo(kmax=fixture["kmax"], nmax=8, nmin=2, cfg=PrecisionConfig(mantissa_bits=BITS))
    ok = abs(rep.phi_at_lambda0) <= mp.mpf("1e-20") and rep.min_rho2 > floor
    record(8, ok, f"lambda0={mp.nstr(rep.lambda0, 12)} |Phi|={mp.nstr(abs(rep.phi_at_lambda0), 3)}, "
                  f"min rho2={mp.nstr(rep.min_rho2, 8)} > floor {mp.nstr(floor, 8)}")


# ---------------------------------------------------------------------------
# 9. proof inequality spot check

def test_criterion_09_proof_inequality():
    violations = 0
    with mp.workprec(BITS):
        for n in (5, 10, 20, 30):
            for s in range(n + 1, 5 * n + 1):
                p, bound = nodal_exponential_bound(n, s)
                violations += not (p < bound)
        consts = solve_c0(CFG)
        offs = []
        for n in (10, 20, 50):
            s = tail_maximizer(n, consts.sigma)
            offs.append(abs(s / (consts.c0 * n) - 1))
    ok = violations == 0 and max(offs) <= 0.01
    record(9, ok, f"{violations} inequality violations; maximizer offsets {[mp.nstr(o, 3) for o in offs]}")


# ---------------------------------------------------------------------------
# 10. determinism

def test_criterion_10_determinism(tmp_path):
    spec = tmp_path / "problem.json"
    spec.write_text(json.dumps({
        "spectrum": {"kind": "integer-line"},
        "coefficients": {"kind": "geometric", "ratio": 0.5, "phase_seed": 42, "zero_indices": [3]},
    }))
    same = []
    for fmt_name, workers in (("json", "1"), ("csv", "1"), ("json", "2")):
        outs = []
        for run in range(2):
            out = tmp_path / f"r{run}.{fmt_name}.{workers}"
            main(["sweep", "--spec", str(spec), "--k", "0,1", "--n", "2..5", "--format", fmt_name,
                  "--workers", workers, "--out", str(out)])
            outs.append(out.read_bytes())
        same.append(outs[0] == outs[1] and len(outs[0]) > 0)
    record(10, all(same), f"byte-identical json/csv/json-2-workers: {same}")
