"""Biased Pauli channel, sampler and the mask-permuted channel."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwcode.noise import NoiseChannel, channel_probs, effective_permuted_channel, parse_eta, sample_error, sample_errors


def test_channel_probs_examples():
    assert channel_probs(0.3, 0.5) == pytest.approx((0.1, 0.1, 0.1), abs=1e-15)
    assert channel_probs(0.3, math.inf) == (0.0, 0.0, 0.3)
    px, py, pz = channel_probs(0.25, 50)
    assert px == pytest.approx(0.25 / 102, abs=1e-15)
    assert py == pytest.approx(0.25 / 102, abs=1e-15)
    assert pz == pytest.approx(12.5 / 51, abs=1e-15)
    assert (round(px, 7), round(pz, 7)) == (0.0024510, 0.2450980)


@pytest.mark.parametrize("p,eta", [(-0.1, 1), (1.1, 1), (0.1, 0.4), (0.1, -1)])
def test_channel_probs_rejects(p, eta):
    with pytest.raises(ValueError):
        channel_probs(p, eta)


def test_parse_eta_tokens():
    assert parse_eta("inf") == math.inf
    assert parse_eta(float("inf")) == math.inf
    assert parse_eta("0.5") == Fraction(1, 2)
    assert parse_eta(30) == Fraction(30)


@given(st.floats(0, 1), st.one_of(st.fractions(min_value=Fraction(1, 2), max_value=10**6), st.just(math.inf)))
def test_channel_probs_invariants(p, eta):
    px, py, pz = channel_probs(p, eta)
    assert px == py
    assert abs(px + py + pz - p) <= 1e-12
    if eta == math.inf:
        assert px == 0 and pz == p
    elif px + py > 1e-200:
        assert abs(pz / (px + py) - float(eta)) <= 1e-12 * max(1.0, float(eta))


def test_sampler_trivial_cases(rng):
    assert sample_error(NoiseChannel(0.0, 0.5), 10, rng).weight == 0
    x, z = sample_errors(NoiseChannel(1.0, "inf"), 10, rng, 5)
    assert not x.any() and z.all()


def test_sampler_frequencies():
    n = 10**6
    x, z = sample_errors(NoiseChannel(0.3, 0.5), 1, np.random.default_rng(7), n)
    out = (x[:, 0] + 2 * z[:, 0]).astype(int)
    counts = np.bincount(out, minlength=4)  # I, X, Z, Y
    expect = np.array([0.7, 0.1, 0.1, 0.1]) * n
    sigma = np.sqrt(expect * (1 - expect / n))
    assert (np.abs(counts - expect) < 4 * sigma).all()


@given(st.integers(0, 2**32 - 1))
def test_sampler_determinism(seed):
    ch = NoiseChannel(0.2, 3)
    a = sample_errors(ch, 9, np.random.default_rng(seed), 4)
    b = sample_errors(ch, 9, np.random.default_rng(seed), 4)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))


def test_effective_permuted_channel(x3z3_5):
    ch = NoiseChannel(0.25, 50)
    n = x3z3_5.n
    same = effective_permuted_channel(ch, np.zeros(n, np.uint8))
    assert np.allclose(same.table(n), ch.table(n))
    full = effective_permuted_channel(NoiseChannel(0.2, "inf"), np.ones(n, np.uint8))
    assert np.allclose(full.table(n), np.tile([0.2, 0.0, 0.0], (n, 1)))
    eff = effective_permuted_channel(ch, x3z3_5.deformation)
    t = eff.table(n)
    m = x3z3_5.mask.astype(bool)
    assert m.any() and (~m).any()
    assert np.allclose(t[m], [12.5 / 51, 0.25 / 102, 0.25 / 102])
    assert np.allclose(t[~m], [0.25 / 102, 0.25 / 102, 12.5 / 51])
    with pytest.raises(ValueError):
        effective_permuted_channel(ch, np.zeros(3, np.uint8)).table(n)
