"""Decoders for pure dephasing (η = ∞).

At infinite Z bias only Z errors occur, and each generator acts as a
classical parity check through its X part. Two decoders are provided.

:class:`InfiniteBiasDecoder` is the two-step linear-symmetry decoder for
the periodic X3Z3 code. Every generator type (the deformed primal and dual
checks) is decoded separately on the qubits its X parts touch. Step 1
drops one colour: each remaining check meets one neighbour in a single
qubit and the other in a pair of qubits, so the checks form closed lines
(repetition codes). Matching on a line fixes the single qubits and the
parity of every pair. Step 2 writes each pair as ``(u, u + parity)``; the
dropped checks then become two-body constraints on the ``u`` variables,
which again form closed lines and are solved at minimum cost. By default
the decoder runs once per dropped colour and keeps, per generator type,
the lightest correction.

:class:`DomainDecoder` is a generic minimum-weight decoder: the check
matrix splits into connected components (the domains), and each component
is solved exactly by enumerating its small kernel. It is used for open
lattices and as an independent oracle for the line decoder.
"""
from __future__ import annotations

import itertools

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .code import StabilizerCode
from .decoders import Decoder, log_odds_weight
from .exact import MalformedSyndromeError
from .lattice import Color
from .noise import NoiseChannel
from .pauli import gf2_right_inverse, kernel_basis

__all__ = ["InfiniteBiasDecoder", "DomainDecoder", "infinite_bias_decode", "symmetry_lines"]


def _z_probs(code: StabilizerCode, ch: NoiseChannel | None) -> NDArray[np.float64]:
    if ch is None:
        return np.full(code.n, 0.1)
    if not ch.is_infinite_bias:
        raise ValueError("infinite-bias decoders need an η = ∞ channel")
    return ch.table(code.n)[:, 2].copy()


def _cycles(nbrs: dict[int, list[tuple[int, object]]]) -> list[tuple[list[int], list[object]]]:
    """Split a 2-regular multigraph into cycles.

    ``nbrs[v]`` lists exactly two ``(neighbour, edge)`` entries. Each cycle is
    ``(vertices, edges)`` with ``edges[i]`` joining ``vertices[i]`` and
    ``vertices[i + 1]`` (cyclically).
    """
    seen: set[int] = set()
    out = []
    for start in sorted(nbrs):
        if start in seen:
            continue
        verts, edges = [start], []
        seen.add(start)
        prev_edge = None
        v = start
        while True:
            (a, ea), (b, eb) = nbrs[v]
            nxt, e = (b, eb) if ea == prev_edge else (a, ea)
            edges.append(e)
            if nxt == start:
                break
            verts.append(nxt)
            seen.add(nxt)
            prev_edge, v = e, nxt
        out.append((verts, edges))
    return out


class _Line:
    """One closed repetition code: syndrome bits ``rows`` joined by ``links``."""

    def __init__(self, rows: list[int], links: list[object]) -> None:
        self.rows = np.asarray(rows, dtype=np.int64)
        self.links = links


def _solve_lines(values: NDArray[np.uint8], cost: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Minimum-cost link bits on a closed line.

    ``values[:, i]`` is the parity of links ``i - 1`` and ``i`` (cyclically). The two
    solutions differ by complementing every link; the cheaper is returned
    (the all-prefix one on ties).
    """
    b = np.cumsum(values, axis=1, dtype=np.int64) & 1
    c0 = b @ cost
    c1 = (1 - b) @ cost
    flip = c1 < c0 - 1e-9
    b[flip] ^= 1
    return b.astype(np.uint8)


class _TypeDecoder:
    """Two-step decoder for one generator type."""

    def __init__(self, code: StabilizerCode, rows: NDArray[np.int64], pz: NDArray[np.float64], drop: int) -> None:
        lat = code.lattice
        H = code.gx[rows]
        self.rows = rows
        colors = lat.face_colors[code.gen_face[rows]]
        if not (H.sum(axis=1) == 3).all():
            raise ValueError("every check must act on three qubits at infinite bias")
        keep = np.flatnonzero(colors != drop)
        dropped = np.flatnonzero(colors == drop)
        # step 1: links between kept checks, keyed by the pair of checks
        link_q: dict[tuple[int, int], list[int]] = {}
        for q in np.flatnonzero(H[keep].any(axis=0)):
            rs = keep[H[keep, q] == 1]
            if len(rs) != 2:
                raise ValueError("each qubit must lie on exactly two kept checks")
            link_q.setdefault((int(rs[0]), int(rs[1])), []).append(int(q))
        nbrs: dict[int, list] = {int(r): [] for r in keep}
        for key in sorted(link_q):
            if len(link_q[key]) not in (1, 2):
                raise ValueError("kept checks must meet in one or two qubits")
            a, b = key
            nbrs[a].append((b, key))
            nbrs[b].append((a, key))
        if any(len(v) != 2 for v in nbrs.values()):
            raise ValueError("kept checks do not form closed symmetry lines")
        self.lines1 = []
        for verts, edges in _cycles(nbrs):
            self.lines1.append(_Line(verts, [link_q[e] for e in edges]))
        self.link_q = link_q
        pairs = sorted(tuple(v) for v in link_q.values() if len(v) == 2)
        self.pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        pair_of = {q: (i, j) for i, pq in enumerate(pairs) for j, q in enumerate(pq)}
        self.pair_of = pair_of
        # step 2: each dropped check touches one single qubit and two pair qubits
        nb2: dict[int, list] = {i: [] for i in range(len(pairs))}
        self.drop_single = np.zeros(len(dropped), np.int64)
        self.drop_bside = np.zeros((len(dropped), 2), np.int64)  # pair ids entering as "u + parity"
        for gi, r in enumerate(dropped):
            qs = np.flatnonzero(H[r])
            inpair = [int(q) for q in qs if int(q) in pair_of]
            single = [int(q) for q in qs if int(q) not in pair_of]
            if len(single) != 1 or len(inpair) != 2 or pair_of[inpair[0]][0] == pair_of[inpair[1]][0]:
                raise ValueError("dropped checks must touch one single qubit and two distinct pairs")
            self.drop_single[gi] = single[0]
            (p0, s0), (p1, s1) = pair_of[inpair[0]], pair_of[inpair[1]]
            self.drop_bside[gi] = (p0 if s0 else -1, p1 if s1 else -1)
            nb2[p0].append((p1, gi))
            nb2[p1].append((p0, gi))
        if any(len(v) != 2 for v in nb2.values()):
            raise ValueError("pair variables do not form closed lines")
        self.dropped = dropped
        self.lines2 = []
        for verts, edges in _cycles(nb2):
            self.lines2.append((np.asarray(verts, np.int64), np.asarray(edges, np.int64)))
        # costs
        w1 = log_odds_weight(pz)
        self.w_qubit = w1
        self.line_costs = []
        for line in self.lines1:
            c = []
            for qs in line.links:
                if len(qs) == 1:
                    c.append(w1[qs[0]])
                else:
                    a, b = pz[qs[0]], pz[qs[1]]
                    c.append(float(log_odds_weight(a * (1 - b) + b * (1 - a))))
            self.line_costs.append(np.asarray(c))

    def decode(self, s: NDArray[np.uint8], n: int) -> NDArray[np.uint8]:
        shots = s.shape[0]
        e = np.zeros((shots, n), np.uint8)
        parity = np.zeros((shots, len(self.pairs)), np.uint8)
        for line, cost in zip(self.lines1, self.line_costs):
            vals = s[:, self.rows[line.rows]]
            if (vals.sum(axis=1) & 1).any():
                raise MalformedSyndromeError("odd number of excitations on a symmetry line")
            b = _solve_lines(vals, cost)
            for i, qs in enumerate(line.links):
                if len(qs) == 1:
                    e[:, qs[0]] = b[:, i]
                else:
                    parity[:, self.pair_of[qs[0]][0]] = b[:, i]
        # right-hand side of each dropped check in the u variables
        rhs = s[:, self.rows[self.dropped]] ^ e[:, self.drop_single]
        for col in (0, 1):
            side = self.drop_bside[:, col]
            has = side >= 0
            rhs[:, has] ^= parity[:, side[has]]
        u = np.zeros((shots, len(self.pairs)), np.uint8)
        wa = self.w_qubit[self.pairs[:, 0]] if len(self.pairs) else np.zeros(0)
        wb = self.w_qubit[self.pairs[:, 1]] if len(self.pairs) else np.zeros(0)
        for verts, edges in self.lines2:
            r = rhs[:, edges]
            if (r.sum(axis=1) & 1).any():
                raise MalformedSyndromeError("inconsistent pair constraints on a symmetry line")
            # u[verts[i + 1]] = u[verts[i]] + r[i]; u[verts[0]] = x
            pre = np.zeros((shots, len(verts)), np.int64)
            pre[:, 1:] = np.cumsum(r[:, :-1], axis=1) & 1
            pv = parity[:, verts].astype(np.int64)
            c0 = pre @ wa[verts] + (pre ^ pv) @ wb[verts]
            c1 = (1 - pre) @ wa[verts] + ((1 - pre) ^ pv) @ wb[verts]
            flip = c1 < c0 - 1e-9
            pre[flip] ^= 1
            u[:, verts] = pre
        if len(self.pairs):
            e[:, self.pairs[:, 0]] = u
            e[:, self.pairs[:, 1]] = u ^ parity
        return e


class InfiniteBiasDecoder(Decoder):
    """Two-step linear-symmetry decoder for X3Z3 codes on periodic lattices.

    Parameters
    ----------
    code : StabilizerCode
        Deformed colour code whose checks act on three qubits each at
        infinite bias (the periodic X3Z3 code).
    ch : NoiseChannel, optional
        η = ∞ channel; supplies per-qubit Z probabilities for tie-breaking
        between the two solutions of each line. Uniform if omitted.
    drop_color : Color or None
        Colour of the checks set aside in the first step; ``None`` (default)
        tries all three and keeps the lightest correction per generator type.
    """

    name = "infinite-bias"

    def __init__(self, code: StabilizerCode, ch: NoiseChannel | None = None, drop_color: int | None = None) -> None:
        super().__init__(code)
        pz = _z_probs(code, ch)
        colors = (Color.RED, Color.GREEN, Color.BLUE) if drop_color is None else (drop_color,)
        self.w = log_odds_weight(pz)
        self.types = []
        for t in (0, 1):
            rows = np.flatnonzero(code.gen_type == t)
            if rows.size:
                self.types.append([_TypeDecoder(code, rows, pz, int(c)) for c in colors])
        supports = [code.gx[td[0].rows].any(axis=0) for td in self.types]
        if len(supports) == 2 and (supports[0] & supports[1]).any():
            raise ValueError("generator types must act on disjoint qubits at infinite bias")

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        z = np.zeros((s.shape[0], self.code.n), np.uint8)
        for variants in self.types:
            best = variants[0].decode(s, self.code.n)
            for td in variants[1:]:
                alt = td.decode(s, self.code.n)
                better = alt @ self.w < best @ self.w - 1e-9
                best[better] = alt[better]
            z ^= best
        return np.zeros_like(z), z


def symmetry_lines(code: StabilizerCode, drop_color: int = Color.GREEN) -> list[NDArray[np.int64]]:
    """Generator indices of every first-step symmetry line."""
    dec = InfiniteBiasDecoder(code, None, drop_color)
    return [td.rows[line.rows] for variants in dec.types for td in variants for line in td.lines1]


def infinite_bias_decode(code: StabilizerCode, ch: NoiseChannel | None, s):
    """Decode one syndrome with :class:`InfiniteBiasDecoder`."""
    return InfiniteBiasDecoder(code, ch).decode(s)


class DomainDecoder(Decoder):
    """Exact minimum-weight Z decoder, solved independently per domain.

    Parameters
    ----------
    code : StabilizerCode
    ch : NoiseChannel, optional
        η = ∞ channel giving per-qubit weights ``-log(p/(1-p))``.
    max_kernel : int
        Largest kernel dimension enumerated per component.
    """

    name = "domain"

    def __init__(self, code: StabilizerCode, ch: NoiseChannel | None = None, max_kernel: int = 16) -> None:
        super().__init__(code)
        w = log_odds_weight(_z_probs(code, ch))
        H = code.gx
        n, m = code.n, H.shape[0]
        # union-find over qubits joined by shared checks
        parent = list(range(n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for r in range(m):
            qs = np.flatnonzero(H[r])
            for q in qs[1:]:
                ra, rb = find(int(qs[0])), find(int(q))
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        roots: dict[int, list[int]] = {}
        for q in range(n):
            roots.setdefault(find(q), []).append(q)
        self.parts = []
        for qs in roots.values():
            qs = np.asarray(qs, np.int64)
            rows = np.flatnonzero(H[:, qs].any(axis=1))
            A = H[np.ix_(rows, qs)]
            P, check = gf2_right_inverse(A)
            K = kernel_basis(A)
            if K.shape[0] > max_kernel:
                raise ValueError(f"domain kernel of dimension {K.shape[0]} exceeds max_kernel")
            combos = np.array(list(itertools.product((0, 1), repeat=K.shape[0])), dtype=np.int64)
            shifts = ((combos.reshape(len(combos), K.shape[0]) @ K.astype(np.int64).reshape(K.shape[0], len(qs))) & 1).astype(np.uint8)
            self.parts.append((qs, rows, P.astype(np.int64), check.astype(np.int64), shifts, w[qs]))

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        shots = s.shape[0]
        z = np.zeros((shots, self.code.n), np.uint8)
        free = np.ones(s.shape[1], bool)
        for qs, rows, P, check, shifts, w in self.parts:
            free[rows] = False
            b = s[:, rows].astype(np.int64)
            if check.size and ((b @ check.T) & 1).any():
                raise MalformedSyndromeError("syndrome is not produced by any Z error")
            x0 = ((b @ P.T) & 1).astype(np.uint8)
            cand = x0[:, None, :] ^ shifts[None, :, :]
            best = np.argmin(cand @ w, axis=1)
            z[:, qs] = cand[np.arange(shots), best]
        if s[:, free].any():
            raise MalformedSyndromeError("syndrome flags a check no Z error can reach")
        return np.zeros_like(z), z
