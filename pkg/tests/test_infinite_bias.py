"""Infinite-bias decoders: symmetry lines, exhaustive guarantees, Monte Carlo ordering."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwcode.code import make_code
from dwcode.exact import MalformedSyndromeError
from dwcode.experiment import SweepConfig, run_sweep
from dwcode.infinite_bias import DomainDecoder, InfiniteBiasDecoder, infinite_bias_decode, symmetry_lines
from dwcode.lattice import Color
from dwcode.noise import NoiseChannel

from helpers import decode_failures

INF = NoiseChannel(0.3, "inf")


@pytest.fixture(scope="module")
def x3z3_l12():
    return make_code("x3z3-periodic", L=12)


def weight_one_z(n):
    return np.zeros((n, n), np.uint8), np.eye(n, dtype=np.uint8)


def test_zero_syndrome(x3z3_l6):
    res = infinite_bias_decode(x3z3_l6, INF, np.zeros(x3z3_l6.m, np.uint8))
    assert res.correction.weight == 0 and res.logical_class == 0


@pytest.mark.parametrize("drop", [None, Color.RED, Color.GREEN, Color.BLUE])
def test_weight_one_z_l6(x3z3_l6, drop):
    x, z = weight_one_z(x3z3_l6.n)
    assert x3z3_l6.n == 72
    assert decode_failures(x3z3_l6, InfiniteBiasDecoder(x3z3_l6, INF, drop), x, z) == 0


def test_weight_one_z_l12(x3z3_l12):
    x, z = weight_one_z(x3z3_l12.n)
    assert decode_failures(x3z3_l12, InfiniteBiasDecoder(x3z3_l12, INF), x, z) == 0


def test_rejects_finite_bias(x3z3_l6):
    with pytest.raises(ValueError):
        InfiniteBiasDecoder(x3z3_l6, NoiseChannel(0.1, 100))
    with pytest.raises(ValueError):
        DomainDecoder(x3z3_l6, NoiseChannel(0.1, 0.5))


def test_rejects_triangular_code(x3z3_5):
    # open lattices have boundary checks that do not close into lines
    with pytest.raises(ValueError):
        InfiniteBiasDecoder(x3z3_5, INF)


@pytest.mark.parametrize("drop", [Color.RED, Color.GREEN, Color.BLUE])
def test_lines_partition_kept_checks(x3z3_l6, drop):
    lines = symmetry_lines(x3z3_l6, drop)
    rows = np.concatenate(lines)
    assert len(set(rows.tolist())) == len(rows)
    colors = x3z3_l6.lattice.face_colors[x3z3_l6.gen_face[rows]]
    assert not (colors == drop).any()
    assert len(rows) == 2 * x3z3_l6.m // 3


@given(st.integers(0, 2**32 - 1), st.sampled_from([Color.RED, Color.GREEN, Color.BLUE]))
def test_conservation_law(x3z3_l6, seed, drop):
    """Every pure-Z error leaves an even number of excitations on each line."""
    rng = np.random.default_rng(seed)
    z = (rng.random((4, x3z3_l6.n)) < rng.random()).astype(np.uint8)
    s = x3z3_l6.syndromes(np.zeros_like(z), z)
    for line in symmetry_lines(x3z3_l6, drop):
        assert not (s[:, line].sum(axis=1) % 2).any()


def test_odd_line_is_malformed(x3z3_l6):
    line = symmetry_lines(x3z3_l6, Color.GREEN)[0]
    s = np.zeros(x3z3_l6.m, np.uint8)
    s[line[0]] = 1
    for dec in (InfiniteBiasDecoder(x3z3_l6, INF), InfiniteBiasDecoder(x3z3_l6, INF, Color.GREEN)):
        with pytest.raises(MalformedSyndromeError):
            dec.decode(s)


def test_domain_decoder_malformed(x3z3_l6):
    s = np.zeros(x3z3_l6.m, np.uint8)
    s[symmetry_lines(x3z3_l6, Color.GREEN)[0][0]] = 1
    with pytest.raises(MalformedSyndromeError):
        DomainDecoder(x3z3_l6, INF).decode(s)


@given(st.integers(0, 2**32 - 1))
def test_domain_decoder_is_minimum_weight(x3z3_l6, seed):
    """The domain decoder never returns more Z flips than the line decoder or the error."""
    rng = np.random.default_rng(seed)
    z = (rng.random((8, x3z3_l6.n)) < 0.3).astype(np.uint8)
    x = np.zeros_like(z)
    s = x3z3_l6.syndromes(x, z)
    _, zd = DomainDecoder(x3z3_l6, INF).decode_batch(s)
    _, zi = InfiniteBiasDecoder(x3z3_l6, INF).decode_batch(s)
    for c in (zd, zi):
        assert np.array_equal(x3z3_l6.syndromes(x, c), s)
    assert (zd.sum(1) <= zi.sum(1)).all()
    assert (zd.sum(1) <= z.sum(1)).all()


def test_domain_decoder_matches_brute_force():
    """Exhaustive minimum weight on the smallest periodic lattice."""
    code = make_code("x3z3-periodic", L=6)
    dec = DomainDecoder(code, INF)
    rng = np.random.default_rng(5)
    z = (rng.random((20, code.n)) < 0.2).astype(np.uint8)
    s = code.syndromes(np.zeros_like(z), z)
    _, zd = dec.decode_batch(s)
    # within each domain, no stabilizer-or-logical Z shift lowers the weight
    for qs, rows, P, check, shifts, w in dec.parts:
        sub = zd[:, qs]
        cand = sub[:, None, :] ^ shifts[None, :, :]
        assert (cand.sum(2).min(1) == sub.sum(1)).all()


def sweep_point(decoder, L, trials=100_000):
    cfg = SweepConfig("x3z3-periodic", (L,), (0.3,), eta="inf", decoder=decoder, trials=trials, seed=1)
    return run_sweep(cfg).points[0]


def test_l12_beats_l6():
    a, b = sweep_point("infinite-bias", 6), sweep_point("infinite-bias", 12)
    assert b.ci_hi < a.ci_lo


def test_line_decoder_not_worse_than_restriction():
    ib, rs = sweep_point("infinite-bias", 6), sweep_point("restriction", 6)
    sigma = np.hypot(np.sqrt(ib.p_L * (1 - ib.p_L) / ib.trials), np.sqrt(rs.p_L * (1 - rs.p_L) / rs.trials))
    assert ib.p_L <= rs.p_L or abs(ib.p_L - rs.p_L) <= 2 * sigma
