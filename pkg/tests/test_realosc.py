"""Real-case oscillatory machinery: the normalized transform against an
independent Simpson oracle, oscillation bounds on certified witness
intervals, superlevel decompositions with their hard caps, and the uniform
certified constant."""

import csv
import math
import os
import random
import tempfile
from fractions import Fraction

import numpy as np

from oracles import simpson_mu_hat

from oscillabound.polycore import ExpPoly, parse_curve_family, phi_from_frequency
from oscillabound.realosc import (
    HIGH,
    LOW,
    QuadratureError,
    Window,
    certified_constant_real,
    classify_frequency,
    merge_intervals,
    mu_hat_real,
    mu_hat_real_with_error,
    osc_integral,
    superlevel_decompose,
    vdc_bound,
    witness_intervals,
    write_profile_csv,
)

FAM_XX2 = parse_curve_family([["0", "1"], ["0", "0", "1"]])
FAM_XX3 = parse_curve_family([["0", "1"], ["0", "0", "0", "1"]])


def _complex_simpson(phi, a, T, n=1 << 15):
    ts = np.linspace(a, T, n + 1)
    ys = np.exp(2j * np.pi * np.array([phi(float(t)) for t in ts]))
    h = (T - a) / n
    return (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum()) * h / 3


def test_window_validation():
    w = Window(1.0, 3.5)
    assert w.length == 2.5
    for bad in ((2.0, 2.0), (3.0, 1.0)):
        try:
            Window(*bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"Window accepted {bad}")


def test_vdc_bound():
    assert abs(vdc_bound(2, 4.0) - 12.0) < 1e-15
    assert vdc_bound(1, 10.0) == 1.2
    # decreasing in eta, increasing in k for eta > 1
    assert vdc_bound(2, 9.0) < vdc_bound(2, 4.0)
    assert vdc_bound(3, 4.0) > vdc_bound(2, 4.0)
    for k, eta in ((0, 1.0), (1, 0.0), (2, -3.0)):
        try:
            vdc_bound(k, eta)
        except ValueError:
            pass
        else:
            raise AssertionError(f"vdc_bound accepted ({k}, {eta})")


def test_classify_frequency():
    fam = parse_curve_family([["0", "1"], ["1", "0", "1"]])  # (x, x^2 + 1)
    assert classify_frequency(fam, (1, Fraction(1, 16))) == LOW
    assert classify_frequency(fam, (5, 1)) == HIGH
    assert classify_frequency(fam, (Fraction(1, 8), Fraction(0))) == LOW
    try:
        classify_frequency(fam, (0, 0))
    except ValueError:
        pass
    else:
        raise AssertionError("lambda = 0 classified")


def test_mu_hat_zero_frequency():
    for fam in (FAM_XX2, FAM_XX3):
        assert mu_hat_real(fam, Window(1, 2), (0, 0)) == 1.0
        assert mu_hat_real_with_error(fam, Window(1, 5), (0, 0)) == (1.0, 0.0)


def test_mu_hat_frozen_simpson_value():
    # frozen from the independent Simpson oracle (oracles.py freeze run)
    got = mu_hat_real(FAM_XX2, Window(1, 2), (Fraction(1, 100), 0), tol=1e-10)
    assert abs(got - 0.9538792762980185) < 1e-9


def test_mu_hat_vs_simpson_random():
    rng = random.Random(41)
    for fam, exps in ((FAM_XX2, (1, 2)), (FAM_XX3, (1, 3))):
        for _ in range(8):
            lam = tuple(
                Fraction(rng.randint(-120, 120), rng.randint(1, 40)) for _ in range(2)
            )
            if all(v == 0 for v in lam):
                continue
            got = mu_hat_real(fam, Window(1, 2), lam, tol=1e-9)
            want = simpson_mu_hat({e: v for e, v in zip(exps, lam)}, 1.0, 2.0)
            assert abs(got - want) < 3e-9, (fam, lam, got, want)


def test_mu_hat_even_and_bounded():
    rng = random.Random(43)
    for _ in range(10):
        lam = (Fraction(rng.randint(-500, 500), 7), Fraction(rng.randint(-500, 500), 11))
        if all(v == 0 for v in lam):
            continue
        plus = mu_hat_real(FAM_XX2, Window(1, 3), lam, tol=1e-8)
        minus = mu_hat_real(FAM_XX2, Window(1, 3), tuple(-v for v in lam), tol=1e-8)
        assert abs(plus - minus) < 3e-8
        assert -1.0 <= plus <= 1.0


def test_mu_hat_validation_guards():
    try:
        mu_hat_real(FAM_XX2, Window(1, 2), (1, 1), tol=0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("oversized tol accepted")
    shifted = parse_curve_family([["-2", "1"], ["0", "-2", "1"]])  # a0 = ln 2
    try:
        mu_hat_real(shifted, Window(0.5, 2), (1, 1))
    except ValueError:
        pass
    else:
        raise AssertionError("window inside a0 accepted")
    mu_hat_real(shifted, Window(1, 2), (1, 1))  # valid window must work
    err = QuadratureError("x", partial=1j, error=2.0)
    assert err.partial == 1j and err.error == 2.0


def test_osc_integral_constant_phase():
    phi = ExpPoly({0: Fraction(1, 3)})
    val, err = osc_integral(phi, 0.0, 2.0, 1e-12)
    want = 2.0 * complex(math.cos(math.tau / 3), math.sin(math.tau / 3))
    assert abs(val - want) < 1e-12 and err == 0.0


def test_osc_integral_vs_complex_simpson():
    rng = random.Random(47)
    for _ in range(6):
        phi = ExpPoly({1: Fraction(rng.randint(-30, 30), 7), 2: Fraction(rng.randint(-30, 30), 9)})
        if phi.is_constant():
            continue
        val, err = osc_integral(phi, 0.0, 1.5, 1e-10)
        want = _complex_simpson(phi, 0.0, 1.5)
        assert err <= 1e-10 * 1.5 + 1e-15
        assert abs(val - want) < 5e-9, (phi, val, want)


def test_huge_frequency_is_fast_and_sane():
    fam = parse_curve_family([["0", "0", "1"], ["0", "0", "0", "1"], ["0", "0", "0", "0", "0", "1"]])
    lam = (Fraction(999_983), Fraction(-1_000_003), Fraction(1_000_033))
    val = mu_hat_real(fam, Window(1, 3), lam, tol=1e-6)
    assert abs(val) < 1e-2  # enormous phase gradient: essentially full cancellation


def test_superlevel_decompose_two_sided():
    phi = ExpPoly({0: -5, 1: 1})  # e^t - 5
    dec = superlevel_decompose(phi, Fraction(1, 2), Window(1, 2))
    assert len(dec) == 2
    (a1, b1), (a2, b2) = ((iv.lo, iv.hi) for iv in dec.intervals)
    assert abs(a1 - 1.0) < 1e-12 and abs(b1 - math.log(4.5)) < 1e-9
    assert abs(a2 - math.log(5.5)) < 1e-9 and abs(b2 - 2.0) < 1e-12
    assert dec.spot_check(phi)


def test_superlevel_decompose_curvature_cut():
    phi = ExpPoly({1: 1, 2: Fraction(-1, 20)})  # second derivative flips at t = ln 5
    dec = superlevel_decompose(phi, Fraction(1, 100), Window(1, 2))
    cut = math.log(5.0)
    assert any(abs(iv.hi - cut) < 1e-9 for iv in dec.intervals)
    assert any(abs(iv.lo - cut) < 1e-9 for iv in dec.intervals)
    assert dec.spot_check(phi)


def test_superlevel_random_caps():
    rng = random.Random(53)
    for _ in range(100):
        n = rng.randint(1, 4)
        terms = {j: Fraction(rng.randint(-5, 5)) for j in range(n + 1)}
        terms[n] = Fraction(rng.choice([x for x in range(-5, 6) if x]))
        phi = ExpPoly(terms)
        level = Fraction(rng.randint(1, 12), 4)
        dec = superlevel_decompose(phi, level, Window(0.0, 2.0))
        assert len(dec) <= 3 * max(phi.max_index, 1)
        assert dec.spot_check(phi)


def test_merge_intervals():
    assert merge_intervals([]) == []
    merged = merge_intervals([[(0.0, 1.0), (2.0, 3.0)], [(0.5, 2.5)]])
    # disjoint, ordered, covering [0, 3], each piece inside its witness set
    sets = [[(0.0, 1.0), (2.0, 3.0)], [(0.5, 2.5)]]
    assert merged[0][0] == 0.0 and merged[-1][1] == 3.0
    for (a1, b1, w), (a2, _, _) in zip(merged, merged[1:]):
        assert b1 <= a2
    for lo, hi, w in merged:
        assert any(s_lo <= lo and hi <= s_hi for s_lo, s_hi in sets[w])


def test_merge_intervals_random_caps():
    rng = random.Random(59)
    for _ in range(100):
        nsets = rng.randint(1, 4)
        sets = []
        for _ in range(nsets):
            pieces = sorted(rng.uniform(0, 10) for _ in range(2 * rng.randint(1, 4)))
            sets.append([(pieces[2 * i], pieces[2 * i + 1]) for i in range(len(pieces) // 2)])
        merged = merge_intervals(sets)
        n = max(nsets, max(len(s) for s in sets))
        assert len(merged) <= 2 * n**4
        for lo, hi, w in merged:
            mid = 0.5 * (lo + hi)
            assert any(s_lo <= mid <= s_hi for s_lo, s_hi in sets[w])


def test_witness_intervals_support_oscillation_bound():
    rng = random.Random(61)
    window = Window(0.0, 2.0)
    checked = 0
    for _ in range(12):
        n = rng.randint(1, 3)
        terms = {j: Fraction(rng.randint(-4, 4)) for j in range(1, n + 1)}
        phi = ExpPoly({j: c for j, c in terms.items() if c != 0})
        if phi.is_constant() or not phi.terms:
            continue
        for k in range(1, phi.max_index + 1):
            der = lambda t: sum(
                float(c) * j**k * math.exp(j * t) for j, c in phi.terms.items()
            )
            peak = max(abs(der(t)) for t in np.linspace(window.a, window.T, 64))
            if peak == 0:
                continue
            eta = Fraction(round(0.25 * peak * 64), 64)
            if eta <= 0:
                continue
            dec = witness_intervals(phi, k, eta, window)
            assert dec.spot_check(phi)
            bound = vdc_bound(k, math.tau * float(eta)) + 1e-6
            for iv in dec.intervals:
                val, err = osc_integral(phi, iv.lo, iv.hi, 1e-10)
                assert abs(val) + err <= bound, (phi, k, eta, iv, abs(val), bound)
                checked += 1
    assert checked >= 20


def test_certified_constant_shape():
    bound = certified_constant_real(FAM_XX2)
    n = FAM_XX2.n
    kappa = 3 * n * 2 * (3 * n) ** 4
    low_budget, low_total = bound.breakdown[LOW]
    assert low_budget == kappa
    assert bound.C >= low_total > 0
    assert bound.breakdown[HIGH] == (0, 0.0)  # L = 0: high case vacuous
    # frozen regression value for the flagship family
    assert abs(bound.C - 729479.6414509641) < 1e-6
    rich = certified_constant_real(parse_curve_family([["0", "1"], ["1", "0", "1"]]))
    assert rich.C >= rich.breakdown[LOW][1]
    assert rich.breakdown[HIGH][1] > 0


def test_certified_floor_spot_sample():
    bound = certified_constant_real(FAM_XX2)
    rng = random.Random(67)
    for window in (Window(1, 2), Window(1, 6)):
        floor = -bound.C / window.length - 1e-6
        for _ in range(12):
            lam = (
                Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 100)),
                Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 100)),
            )
            val = mu_hat_real(FAM_XX2, window, lam, tol=1e-6)
            assert val >= floor


def test_write_profile_csv_roundtrip():
    lams = [(0, 0), (Fraction(1, 100), 0), (Fraction(-1, 2), Fraction(1, 3))]
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "profile.csv")
        write_profile_csv(path, FAM_XX2, Window(1, 2), lams, tol=1e-8)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    assert rows[0] == ["lambda_1", "lambda_2", "value", "error"]
    assert len(rows) == 1 + len(lams)
    for row, lam in zip(rows[1:], lams):
        assert [float(row[0]), float(row[1])] == [float(lam[0]), float(lam[1])]
        want, _ = mu_hat_real_with_error(FAM_XX2, Window(1, 2), lam, tol=1e-8)
        assert abs(float(row[2]) - want) < 1e-12
        assert float(row[3]) >= 0.0
