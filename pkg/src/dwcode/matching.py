"""Exact minimum-weight perfect matching and syndrome-graph types.

:func:`mwpm` solves the matching exactly with the blossom algorithm from
networkx (maximum-weight matching on negated weights, maximum cardinality),
then fixes a deterministic optimum: the lexicographically smallest pair set
among all minimum-weight perfect matchings. :func:`brute_force_mwpm` is an
independent enumeration oracle for small graphs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import networkx as nx

__all__ = [
    "BOUNDARY",
    "SyndromeGraph",
    "Matching",
    "NoPerfectMatchingError",
    "mwpm",
    "brute_force_mwpm",
]

#: Tag for boundary nodes in :class:`SyndromeGraph`.
BOUNDARY = "BOUNDARY"


class NoPerfectMatchingError(ValueError):
    """The graph admits no perfect matching."""


@dataclass
class SyndromeGraph:
    """Weighted graph of flipped checks plus boundary nodes.

    ``nodes`` holds check ids or ``(BOUNDARY, i)`` tuples; every edge is
    ``(u, v, weight, path)`` where ``path`` lists the qubit moves realising it.
    """

    nodes: list[Hashable] = field(default_factory=list)
    edges: list[tuple[Hashable, Hashable, float, tuple]] = field(default_factory=list)

    def is_boundary(self, node: Hashable) -> bool:
        return isinstance(node, tuple) and len(node) == 2 and node[0] == BOUNDARY

    def to_json(self) -> str:
        return json.dumps(
            {
                "nodes": [list(v) if isinstance(v, tuple) else v for v in self.nodes],
                "edges": [
                    {"u": list(u) if isinstance(u, tuple) else u, "v": list(v) if isinstance(v, tuple) else v, "weight": w, "path": list(p)}
                    for u, v, w, p in self.edges
                ],
            },
            default=int,
        )


@dataclass
class Matching:
    """Perfect matching as sorted node pairs with their total weight."""

    pairs: list[tuple[Hashable, Hashable]]
    total_weight: float

    def to_json(self) -> str:
        return json.dumps({"pairs": [[a, b] for a, b in self.pairs], "total_weight": self.total_weight}, default=str)


def _key(v: Hashable):
    return (0, v) if not isinstance(v, tuple) else (1, str(v))


def _normalise(nodes, edges, boundary):
    order = sorted(set(nodes), key=_key)
    idx = {v: i for i, v in enumerate(order)}
    if len(idx) != len(list(nodes)):
        raise ValueError("duplicate nodes")
    W: dict[tuple[int, int], float] = {}
    for e in edges:
        u, v, w = e[0], e[1], float(e[2])
        if w < 0 or w != w or w == float("inf"):
            raise ValueError(f"edge weight must be finite and non-negative, got {w}")
        if u == v:
            continue
        a, b = sorted((idx[u], idx[v]))
        if (a, b) not in W or w < W[(a, b)]:
            W[(a, b)] = w
    bset = sorted(idx[b] for b in (boundary or ()))
    for i in range(len(bset)):
        for j in range(i + 1, len(bset)):
            W[(bset[i], bset[j])] = 0.0
    return order, W


def _solve(n: int, W: dict[tuple[int, int], float], forced: Sequence[tuple[int, int]] = ()):
    """Min-weight perfect matching on index graph; returns (weight, pairs) or None."""
    used = set()
    base = 0.0
    for a, b in forced:
        used.update((a, b))
        base += W[(a, b)]
    free = [i for i in range(n) if i not in used]
    if not free:
        return base, list(forced)
    G = nx.Graph()
    G.add_nodes_from(free)
    big = 1.0 + sum(W.values())
    for (a, b), w in W.items():
        if a in used or b in used:
            continue
        G.add_edge(a, b, weight=big - w)
    M = nx.max_weight_matching(G, maxcardinality=True)
    if 2 * len(M) != len(free):
        return None
    pairs = [tuple(sorted(p)) for p in M]
    return base + sum(W[p] for p in pairs), sorted(list(forced) + pairs)


def mwpm(
    nodes: Iterable[Hashable],
    weighted_edges: Iterable[tuple],
    boundary: Iterable[Hashable] | None = None,
    tie_break: bool = True,
    rtol: float = 1e-9,
) -> Matching:
    """Exact minimum-weight perfect matching.

    Parameters
    ----------
    nodes : iterable
        Node ids.
    weighted_edges : iterable of (u, v, weight[, ...])
        Non-negative finite weights; parallel edges keep the lightest.
    boundary : iterable, optional
        Boundary nodes; every pair of them is joined by a zero-weight edge so
        unpaired boundary nodes can absorb each other.
    tie_break : bool
        Return the lexicographically smallest optimal pair set.
    """
    order, W = _normalise(list(nodes), list(weighted_edges), boundary)
    n = len(order)
    if n == 0:
        return Matching([], 0.0)
    if n % 2:
        raise NoPerfectMatchingError("odd number of nodes")
    best = _solve(n, W)
    if best is None:
        raise NoPerfectMatchingError("graph has no perfect matching")
    opt, pairs = best
    if tie_break:
        tol = rtol * max(1.0, abs(opt))
        forced: list[tuple[int, int]] = []
        done: set[int] = set()
        for a in range(n):
            if a in done:
                continue
            for b in range(a + 1, n):
                if b in done or (a, b) not in W:
                    continue
                trial = _solve(n, W, forced + [(a, b)])
                if trial is not None and trial[0] <= opt + tol:
                    forced.append((a, b))
                    done.update((a, b))
                    break
        pairs = forced
    total = sum(W[p] for p in pairs)
    return Matching([(order[a], order[b]) for a, b in pairs], total)


def brute_force_mwpm(nodes: Sequence[Hashable], weighted_edges: Iterable[tuple]) -> float:
    """Minimum perfect-matching weight by enumerating all pairings (oracle)."""
    order, W = _normalise(list(nodes), list(weighted_edges), None)
    n = len(order)
    if n % 2:
        raise NoPerfectMatchingError("odd number of nodes")
    best = [float("inf")]

    def rec(rem: tuple[int, ...], acc: float) -> None:
        if acc >= best[0]:
            return
        if not rem:
            best[0] = acc
            return
        a = rem[0]
        for i in range(1, len(rem)):
            b = rem[i]
            w = W.get((a, b))
            if w is None:
                continue
            rec(rem[1:i] + rem[i + 1 :], acc + w)

    rec(tuple(range(n)), 0.0)
    if best[0] == float("inf"):
        raise NoPerfectMatchingError("graph has no perfect matching")
    return best[0]
