"""Threshold fit, hashing bound and sub-threshold scaling."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from dwcode.analysis import (
    PRESETS,
    DegenerateFitError,
    InsufficientFailuresError,
    NoCrossingError,
    ThresholdEstimate,
    collapse_csv,
    find_crossings,
    fit_subthreshold,
    fit_threshold,
    hashing_bound,
)
from dwcode.code import make_code
from dwcode.exact import coset_table, exact_logical_rate
from dwcode.experiment import PointStats, SweepConfig
from dwcode.noise import NoiseChannel

TRUE = dict(p_th=0.126, beta=0.7, B0=0.2, B1=1.5, B2=2.0)
SIZES = (9, 11, 13, 17)
GRID = tuple(round(0.110 + 0.005 * i, 3) for i in range(7))


def point(d, p, trials, failures, eta="1/2"):
    return PointStats("c", "x3z3", d, None, None, "1", "1*pi/6", eta, p, "restriction", trials, failures,
                      failures / trials, 0.0, 1.0, 0, 0.0)


def synthetic(seed=0, trials=100_000, true=TRUE, sizes=SIZES, grid=GRID):
    rng = np.random.default_rng(seed)
    out = []
    for d in sizes:
        for p in grid:
            x = (p - true["p_th"]) * d ** true["beta"]
            pl = true["B0"] + true["B1"] * x + true["B2"] * x * x
            out.append(point(d, p, trials, int(rng.binomial(trials, pl))))
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_recovers_planted_threshold(seed):
    est = fit_threshold(synthetic(seed))
    assert abs(est.p_th - TRUE["p_th"]) <= 0.002
    assert abs(est.beta - TRUE["beta"]) < 0.1
    assert not est.extrapolated and est.sizes == list(SIZES)
    assert np.isfinite(est.residual) and est.dof == len(SIZES) * len(GRID) - 5


def test_estimate_json_round_trip():
    est = fit_threshold(synthetic())
    assert ThresholdEstimate(**json.loads(est.to_json())) == est


def test_flat_data_is_degenerate():
    pts = [point(d, p, 100_000, 20_000) for d in SIZES for p in GRID]
    with pytest.raises(DegenerateFitError):
        fit_threshold(pts)


def test_two_sizes_rejected():
    with pytest.raises(ValueError):
        fit_threshold(synthetic(sizes=(9, 11)))


def test_needs_failures():
    pts = synthetic()
    pts[0] = point(pts[0].d, pts[0].p, 100_000, 50)
    with pytest.raises(InsufficientFailuresError):
        fit_threshold(pts)


def test_no_crossing():
    # larger codes are always better: curves never meet
    pts = [point(d, p, 100_000, int((0.5 * p + 0.1 - 0.005 * d) * 100_000)) for d in SIZES for p in GRID]
    assert find_crossings(pts) == []
    with pytest.raises(NoCrossingError):
        fit_threshold(pts)


def test_crossing_of_non_adjacent_sizes():
    # the middle size lies above both others, only the outer pair crosses
    pts = []
    for d, shift in ((9, 0.0), (11, 0.05), (13, 0.0)):
        for p in GRID:
            pl = 0.2 + (p - 0.125) * (1.0 if d == 9 else 2.0) + shift
            pts.append(point(d, p, 100_000, int(pl * 100_000)))
    assert find_crossings(pts) == pytest.approx([0.125], abs=1e-3)


def test_extrapolated_flag():
    est = fit_threshold(synthetic(grid=GRID[3:]))
    assert est.extrapolated == (not GRID[3] <= est.p_th <= GRID[-1])


@settings(max_examples=10)
@given(st.permutations(list(range(len(SIZES) * len(GRID)))))
def test_reordering_invariance(perm):
    pts = synthetic()
    a = fit_threshold(pts)
    b = fit_threshold([pts[i] for i in perm])
    assert b.p_th == pytest.approx(a.p_th, abs=1e-7)
    assert b.beta == pytest.approx(a.beta, abs=1e-5)


def test_trial_scaling_invariance():
    pts = synthetic()
    scaled = [point(pt.d, pt.p, 10 * pt.trials, 10 * pt.failures) for pt in pts]
    a, b = fit_threshold(pts), fit_threshold(scaled)
    assert abs(a.p_th - b.p_th) <= a.stderr["p_th"]
    assert b.stderr["p_th"] < a.stderr["p_th"]


def test_collapse_csv():
    pts = synthetic()
    est = fit_threshold(pts)
    lines = collapse_csv(pts, est).splitlines()
    assert lines[0] == "p,d,p_L,ci_lo,ci_hi,x" and len(lines) == len(pts) + 1
    p, d, *_, x = (float(v) for v in lines[1].split(","))
    assert x == pytest.approx((p - est.p_th) * d ** est.beta)


def test_presets_are_valid_configs():
    for name, kw in PRESETS.items():
        cfg = SweepConfig(**kw)
        assert cfg.sizes and cfg.p_grid, name


def entropy_oracle(p, eta):
    pxy = p / (2 * (eta + 1))
    pz = p - 2 * pxy
    return -sum(q * math.log2(q) for q in (1 - p, pxy, pxy, pz) if q > 0)


def test_hashing_depolarizing():
    ref = brentq(lambda p: entropy_oracle(p, 0.5) - 1.0, 1e-6, 0.5, xtol=1e-14)
    assert hashing_bound(0.5) == pytest.approx(ref, abs=1e-9)
    assert hashing_bound("1/2") == pytest.approx(0.18929, abs=1e-5)


@pytest.mark.parametrize("eta", [1, 3, 10, 100, 1000])
def test_hashing_matches_oracle(eta):
    ref = brentq(lambda p: entropy_oracle(p, eta) - 1.0, 1e-6, 0.5, xtol=1e-14)
    assert hashing_bound(eta) == pytest.approx(ref, abs=1e-9)


def test_hashing_infinite_and_monotone():
    assert hashing_bound("inf") == 0.5
    etas = [0.5, 1, 3, 10, 30, 100, 1000, 1e4, 1e6, 1e8, 1e10]
    vals = [hashing_bound(e) for e in etas]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert hashing_bound(100) > hashing_bound(0.5)


def test_hashing_approaches_half():
    # the bound sits at the flat top of the binary entropy, so the gap
    # shrinks like the square root of the residual X/Y entropy
    gaps = [0.5 - hashing_bound(10.0 ** k) for k in (6, 8, 10, 12)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[0] < 2.5e-3 and gaps[2] < 1e-4


def test_subthreshold_planted_slope():
    pairs = [(d, math.exp(-2 * d)) for d in (3, 5, 7, 9)]
    fit = fit_subthreshold(pairs)
    assert fit.slope == pytest.approx(-2.0, abs=1e-9)
    assert fit.intercept == pytest.approx(0.0, abs=1e-9)
    assert fit.residual < 1e-18


def test_subthreshold_constant():
    assert fit_subthreshold([(3, 0.1), (5, 0.1), (7, 0.1)]).slope == pytest.approx(0.0, abs=1e-12)


def test_subthreshold_zero_failures():
    with pytest.raises(InsufficientFailuresError):
        fit_subthreshold([point(3, 0.05, 100, 0), point(5, 0.05, 100, 3)])


def test_subthreshold_mixed_points_rejected():
    with pytest.raises(ValueError):
        fit_subthreshold([point(3, 0.05, 100, 5), point(5, 0.06, 100, 3)])


def test_subthreshold_exact_rates():
    ch = NoiseChannel(0.05, 0.5)
    P5 = coset_table(make_code("x3z3", d=5), ch)
    pairs = [(3, exact_logical_rate(make_code("x3z3", d=3), ch)), (5, float((P5.sum(1) - P5.max(1)).sum()))]
    assert fit_subthreshold(pairs).slope < 0


def test_subthreshold_qubit_abscissa():
    pts = [point(3, 0.05, 1000, 40), point(5, 0.05, 1000, 10), point(7, 0.05, 1000, 3)]
    fit = fit_subthreshold(pts, "N_q")
    xs = [7, 19, 37]
    ref = np.polyfit(xs, np.log([0.04, 0.01, 0.003]), 1)
    assert fit.slope == pytest.approx(ref[0], rel=1e-9)
    assert fit.abscissa == "N_q"
