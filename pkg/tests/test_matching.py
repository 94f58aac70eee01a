"""Exact minimum-weight perfect matching against a brute-force oracle."""
from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwcode.matching import BOUNDARY, Matching, NoPerfectMatchingError, SyndromeGraph, brute_force_mwpm, mwpm


def complete_graph(rng, n, integer=False):
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            w = float(rng.integers(0, 20)) if integer else float(rng.random() * 10)
            edges.append((i, j, w))
    return list(range(n)), edges


def is_perfect(m, nodes):
    got = sorted(v for pair in m.pairs for v in pair)
    return got == sorted(nodes)


def test_examples():
    m = mwpm([0, 1], [(0, 1, 3.0)])
    assert m.pairs == [(0, 1)] and m.total_weight == 3.0
    w = {(1, 2): 1, (3, 4): 1}
    edges = [(a, b, w.get((a, b), 10)) for a in range(1, 5) for b in range(a + 1, 5)]
    m = mwpm([1, 2, 3, 4], edges)
    assert sorted(m.pairs) == [(1, 2), (3, 4)] and m.total_weight == 2


def test_thousand_random_graphs_match_brute_force():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = 2 * int(rng.integers(1, 7))
        nodes, edges = complete_graph(rng, n)
        m = mwpm(nodes, edges, tie_break=False)
        assert is_perfect(m, nodes)
        assert m.total_weight == pytest.approx(brute_force_mwpm(nodes, edges), abs=1e-9)


def test_tie_break_deterministic_and_optimal():
    rng = np.random.default_rng(3)
    for _ in range(50):
        nodes, edges = complete_graph(rng, 8, integer=True)
        a = mwpm(nodes, edges)
        b = mwpm(list(reversed(nodes)), list(reversed(edges)))
        assert a.pairs == b.pairs
        assert a.total_weight == brute_force_mwpm(nodes, edges)


def test_boundary_nodes_absorb():
    nodes = [0, 1, (BOUNDARY, 0), (BOUNDARY, 1)]
    edges = [(0, 1, 10.0), (0, (BOUNDARY, 0), 1.0), (1, (BOUNDARY, 1), 1.0)]
    m = mwpm(nodes, edges, boundary=[(BOUNDARY, 0), (BOUNDARY, 1)])
    assert m.total_weight == 2.0
    # without the boundary the only option is the direct edge plus the twins must pair
    nodes2 = [0, 1, (BOUNDARY, 0), (BOUNDARY, 1)]
    m2 = mwpm(nodes2, [(0, 1, 0.5), (0, (BOUNDARY, 0), 1.0), (1, (BOUNDARY, 1), 1.0)], boundary=[(BOUNDARY, 0), (BOUNDARY, 1)])
    assert m2.total_weight == 0.5


def test_errors():
    with pytest.raises(NoPerfectMatchingError):
        mwpm([0, 1, 2], [(0, 1, 1.0)])
    with pytest.raises(NoPerfectMatchingError):
        mwpm([0, 1, 2, 3], [(0, 1, 1.0), (1, 2, 1.0)])
    with pytest.raises(ValueError):
        mwpm([0, 1], [(0, 1, -1.0)])
    with pytest.raises(ValueError):
        mwpm([0, 1], [(0, 1, float("inf"))])
    assert mwpm([], []).total_weight == 0.0


def test_json_dumps():
    g = SyndromeGraph(nodes=[0, (BOUNDARY, 0)], edges=[(0, (BOUNDARY, 0), 1.5, (3, 4))])
    data = json.loads(g.to_json())
    assert data["edges"][0]["weight"] == 1.5
    assert json.loads(Matching([(0, 1)], 1.0).to_json())["total_weight"] == 1.0


@given(st.integers(1, 5), st.integers(0, 2**31 - 1), st.floats(0.1, 0.9))
def test_sparse_graphs_match_brute_force(half, seed, density):
    rng = np.random.default_rng(seed)
    n = 2 * half
    edges = [(i, j, float(rng.random())) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    try:
        best = brute_force_mwpm(list(range(n)), edges)
    except NoPerfectMatchingError:
        with pytest.raises(NoPerfectMatchingError):
            mwpm(list(range(n)), edges)
        return
    m = mwpm(list(range(n)), edges)
    assert is_perfect(m, list(range(n)))
    assert m.total_weight == pytest.approx(best, abs=1e-9)
