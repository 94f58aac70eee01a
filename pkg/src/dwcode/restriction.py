"""Restriction decoder for colour codes with bias-aware weights.

In the dual picture each qubit is a triangle on three vertices (faces or
virtual boundary vertices) of distinct colours. For the shared colour R and
each other colour C, the restricted lattice keeps the R and C vertices and
turns every qubit into an edge between its R and C vertex. Flipped checks
of the two colours are matched on both restricted lattices; the matched
edges are then lifted to qubits around each R vertex by solving a small
local GF(2) system at minimum cost. With ``shared_color=None`` the
decoder runs once per choice of shared colour and keeps, per sector, the
correction of least total weight; a degenerate restricted matching can lift
to a logical for one shared colour but not for the others.

Two matching engines are provided: ``"pymatching"`` (sparse blossom on the
restricted lattice, fast) and ``"reference"`` (Dijkstra distances, complete
:class:`SyndromeGraph` and the exact :func:`mwpm`).
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np
import pymatching
from numpy.typing import ArrayLike, NDArray

from .code import StabilizerCode
from .decoders import Decoder, css_frame_marginals, log_odds_weight
from .exact import Syndrome
from .lattice import Color
from .matching import BOUNDARY, SyndromeGraph, Matching, mwpm
from .noise import NoiseChannel
from .pauli import gf2_right_inverse, kernel_basis

__all__ = ["RestrictionDecoder", "build_restricted_graphs", "restriction_decode"]


@dataclass
class _Restricted:
    """One restricted lattice (shared colour R plus colour C)."""

    color: int
    pairs: list[tuple[int, int]]  # (R vertex, C vertex), not both virtual
    pair_qubits: list[list[int]]
    det_faces: NDArray[np.int64]  # face id of each detector


@dataclass
class _Star:
    """Local lifting system around one R vertex."""

    qubits: NDArray[np.int64]
    pairs: NDArray[np.int64]  # global pair ids (over both restricted lattices)
    pinv: NDArray[np.uint8]  # (len(qubits), len(pairs))
    kernel: NDArray[np.uint8]  # (kdim, len(qubits))
    check: NDArray[np.uint8]  # rows annihilating consistent parities


class RestrictionDecoder(Decoder):
    """Two-sector restriction decoder.

    Parameters
    ----------
    code : StabilizerCode
        Colour code (possibly deformed) on a lattice with vertex data.
    ch : NoiseChannel
    engine : {"pymatching", "reference"}
    shared_color : Color or None
        Colour shared by both restricted lattices; ``None`` (default) tries
        all three and keeps the cheapest correction per sector.
    """

    name = "restriction"

    def __init__(self, code: StabilizerCode, ch: NoiseChannel, engine: str = "pymatching", shared_color: int | None = None) -> None:
        super().__init__(code)
        self._others: list[RestrictionDecoder] = []
        if shared_color is None:
            shared_color = Color.RED
            self._others = [RestrictionDecoder(code, ch, engine, c) for c in (Color.GREEN, Color.BLUE)]
        lat = code.lattice
        if lat.qubit_vertices is None:
            raise ValueError("restriction decoder needs a colour-code lattice")
        if engine not in ("pymatching", "reference"):
            raise ValueError(f"unknown matching engine {engine!r}")
        self.ch, self.engine = ch, engine
        self.F = lat.num_faces
        self.vcol = lat.vertex_colors.astype(np.int64)
        qv = lat.qubit_vertices
        n = code.n
        r = int(shared_color)
        others = [c for c in (0, 1, 2) if c != r]
        self.r = r
        # vertex of each colour around each qubit
        vc = np.zeros((n, 3), np.int64)
        for q in range(n):
            for v in qv[q]:
                vc[q, self.vcol[v]] = v
        self.vc = vc
        qx, qz = css_frame_marginals(code, ch)
        self.probs = {"Z": qz, "X": qx}
        self.weights = {"Z": log_odds_weight(qz), "X": log_odds_weight(qx)}
        # generator row of each (sector, face)
        self.rows = {}
        for sector, t in (("Z", 0), ("X", 1)):
            rows = np.full(self.F, -1, np.int64)
            sel = np.flatnonzero(code.gen_type == t)
            rows[code.gen_face[sel]] = sel
            self.rows[sector] = rows
        # restricted lattices and global pair ids
        self.restricted: list[_Restricted] = []
        pair_id: dict[tuple[int, int], int] = {}
        self.pair_list: list[tuple[int, int]] = []
        for c in others:
            d: dict[tuple[int, int], list[int]] = {}
            for q in range(n):
                a, b = int(vc[q, r]), int(vc[q, c])
                if a >= self.F and b >= self.F:
                    continue
                d.setdefault((a, b), []).append(q)
            pairs = sorted(d)
            for p in pairs:
                pair_id[p] = len(self.pair_list)
                self.pair_list.append(p)
            det = np.flatnonzero((lat.face_colors == r) | (lat.face_colors == c))
            self.restricted.append(_Restricted(c, pairs, [d[p] for p in pairs], det))
        self.pair_id = pair_id
        self.edge_weights = {sector: self._edge_weights(self.probs[sector]) for sector in ("Z", "X")}
        self._build_stars()
        self._matchers = {}
        if engine == "pymatching":
            for sector in ("Z", "X"):
                self._matchers[sector] = [self._pymatching_graph(rl, self.edge_weights[sector]) for rl in self.restricted]

    # -- construction -------------------------------------------------------

    def _edge_weights(self, q: NDArray[np.float64]) -> NDArray[np.float64]:
        """Weight of each restricted edge from the probability that an odd number of its qubits flip."""
        out = np.zeros(len(self.pair_list))
        for rl in self.restricted:
            for pair, qs in zip(rl.pairs, rl.pair_qubits):
                odd = 0.5 * (1.0 - np.prod(1.0 - 2.0 * q[qs]))
                out[self.pair_id[pair]] = log_odds_weight(odd)
        return out

    def _pymatching_graph(self, rl: _Restricted, ew: NDArray[np.float64]) -> pymatching.Matching:
        local = {int(f): i for i, f in enumerate(rl.det_faces)}
        m = pymatching.Matching()
        base = self.pair_id[rl.pairs[0]]
        for k, ((a, b), qs) in enumerate(zip(rl.pairs, rl.pair_qubits)):
            wt = float(ew[self.pair_id[(a, b)]])
            fid = {self.pair_id[(a, b)] - base}
            if a < self.F and b < self.F:
                m.add_edge(local[a], local[b], fault_ids=fid, weight=wt, merge_strategy="smallest-weight")
            else:
                u = a if a < self.F else b
                m.add_boundary_edge(local[u], fault_ids=fid, weight=wt, merge_strategy="smallest-weight")
        if m.num_detectors < len(local):
            # faces with no restricted edge cannot occur on valid lattices
            raise ValueError("restricted lattice has isolated detectors")
        return m

    def _build_stars(self) -> None:
        n = self.code.n
        self.stars: list[_Star] = []
        rverts = sorted(set(int(v) for v in self.vc[:, self.r]))
        for v in rverts:
            qs = np.flatnonzero(self.vc[:, self.r] == v)
            prs = sorted({self.pair_id[p] for q in qs for p in self._qubit_pairs(int(q)) if p in self.pair_id})
            col = {p: i for i, p in enumerate(prs)}
            A = np.zeros((len(prs), len(qs)), np.uint8)
            for j, q in enumerate(qs):
                for p in self._qubit_pairs(int(q)):
                    if p in self.pair_id:
                        A[col[self.pair_id[p]], j] = 1
            pinv, check = gf2_right_inverse(A)
            K = kernel_basis(A) if A.size else np.eye(len(qs), dtype=np.uint8)
            self.stars.append(_Star(qs, np.array(prs, dtype=np.int64), pinv, K, check))

    def _qubit_pairs(self, q: int) -> list[tuple[int, int]]:
        a = int(self.vc[q, self.r])
        return [(a, int(self.vc[q, rl.color])) for rl in self.restricted]

    # -- decoding -----------------------------------------------------------

    def _sector_faces(self, s: NDArray[np.uint8], sector: str) -> NDArray[np.uint8]:
        rows = self.rows[sector]
        out = np.zeros((s.shape[0], self.F), np.uint8)
        ok = rows >= 0
        out[:, ok] = s[:, rows[ok]]
        return out

    def _match_pymatching(self, faces: NDArray[np.uint8], sector: str) -> NDArray[np.uint8]:
        shots = faces.shape[0]
        parity = np.zeros((shots, len(self.pair_list)), np.uint8)
        base = 0
        for rl, m in zip(self.restricted, self._matchers[sector]):
            det = faces[:, rl.det_faces]
            pred = m.decode_batch(det)
            parity[:, base : base + len(rl.pairs)] = pred[:, : len(rl.pairs)]
            base += len(rl.pairs)
        return parity

    def _lift(self, parity: NDArray[np.uint8], w: NDArray[np.float64]) -> NDArray[np.uint8]:
        shots = parity.shape[0]
        corr = np.zeros((shots, self.code.n), np.uint8)
        for st in self.stars:
            b = parity[:, st.pairs]
            if st.check.size and ((b.astype(np.int64) @ st.check.T.astype(np.int64)) & 1).any():
                raise RuntimeError("lifting system unsolvable: matched edges inconsistent at an R vertex")
            x0 = ((b.astype(np.int64) @ st.pinv.T.astype(np.int64)) & 1).astype(np.uint8)
            if st.kernel.shape[0]:
                kd = st.kernel.shape[0]
                combos = np.array(list(itertools.product((0, 1), repeat=kd)), dtype=np.int64)
                shifts = ((combos @ st.kernel.astype(np.int64)) & 1).astype(np.uint8)  # (2^kd, nq)
                cand = x0[:, None, :] ^ shifts[None, :, :]
                cost = cand @ w[st.qubits]
                best = np.argmin(cost, axis=1)
                x0 = cand[np.arange(shots), best]
            corr[:, st.qubits] = x0
        return corr

    def sector_parities(self, s: NDArray[np.uint8], sector: str) -> NDArray[np.uint8]:
        faces = self._sector_faces(s, sector)
        if self.engine == "pymatching":
            return self._match_pymatching(faces, sector)
        return np.array([self._match_reference(f, sector)[0] for f in faces], dtype=np.uint8).reshape(len(faces), -1)

    def sector_correction(self, s: NDArray[np.uint8], sector: str) -> NDArray[np.uint8]:
        """CSS-frame correction of one sector for this shared colour only."""
        return self._lift(self.sector_parities(s, sector), self.weights[sector])

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        cz, cx = self.sector_correction(s, "Z"), self.sector_correction(s, "X")
        for other in self._others:
            for sector, c in (("Z", cz), ("X", cx)):
                w = self.weights[sector]
                alt = other.sector_correction(s, sector)
                better = alt @ w < c @ w - 1e-9
                c[better] = alt[better]
        m = self.code.mask.astype(bool)
        x, z = cx, cz
        x[:, m], z[:, m] = cz[:, m], cx[:, m]
        return x, z

    # -- reference engine ---------------------------------------------------

    def restricted_graphs(self, faces: NDArray[np.uint8], sector: str) -> list[SyndromeGraph]:
        """Complete syndrome graphs (Dijkstra distances) for one syndrome."""
        return [self._syndrome_graph(rl, faces, self.edge_weights[sector]) for rl in self.restricted]

    def _adjacency(self, rl: _Restricted, ew: NDArray[np.float64]):
        adj: dict[int, list[tuple[int, float, int]]] = {}
        for (a, b), qs in zip(rl.pairs, rl.pair_qubits):
            pid = self.pair_id[(a, b)]
            wt = float(ew[pid])
            adj.setdefault(a, []).append((b, wt, pid))
            adj.setdefault(b, []).append((a, wt, pid))
        return adj

    def _dijkstra(self, adj, src: int):
        dist = {src: 0.0}
        prev: dict[int, tuple[int, int]] = {}
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, wt, pid in sorted(adj.get(u, ()), key=lambda e: (e[2], e[0])):
                nd = d + wt
                if nd < dist.get(v, np.inf) - 1e-12:
                    dist[v] = nd
                    prev[v] = (u, pid)
                    if v < self.F:
                        heapq.heappush(heap, (nd, v))
        return dist, prev

    @staticmethod
    def _path(prev, dst: int) -> tuple[int, ...]:
        out = []
        while dst in prev:
            u, pid = prev[dst]
            out.append(pid)
            dst = u
        return tuple(out)

    def _syndrome_graph(self, rl: _Restricted, faces: NDArray[np.uint8], ew: NDArray[np.float64]) -> SyndromeGraph:
        adj = self._adjacency(rl, ew)
        flipped = [int(f) for f in rl.det_faces if faces[f]]
        g = SyndromeGraph(nodes=list(flipped))
        for u in flipped:
            dist, prev = self._dijkstra(adj, u)
            for v in flipped:
                if v > u and v in dist:
                    g.edges.append((u, v, dist[v], self._path(prev, v)))
            virt = [x for x in dist if x >= self.F]
            if virt:
                vb = min(virt, key=lambda x: (dist[x], x))
                bnode = (BOUNDARY, u)
                g.nodes.append(bnode)
                g.edges.append((u, bnode, dist[vb], self._path(prev, vb)))
        return g

    def _match_reference(self, faces: NDArray[np.uint8], sector: str) -> tuple[NDArray[np.uint8], list[Matching]]:
        parity = np.zeros(len(self.pair_list), np.uint8)
        matchings = []
        for g in self.restricted_graphs(faces, sector):
            bnd = [v for v in g.nodes if g.is_boundary(v)]
            M = mwpm(g.nodes, g.edges, boundary=bnd, tie_break=False)
            paths = {}
            for u, v, wt, path in g.edges:
                paths[(u, v)] = path
                paths[(v, u)] = path
            for a, b in M.pairs:
                if g.is_boundary(a) and g.is_boundary(b):
                    continue
                for pid in paths[(a, b)]:
                    parity[pid] ^= 1
            matchings.append(M)
        return parity, matchings


def build_restricted_graphs(code: StabilizerCode, ch: NoiseChannel, s) -> dict[str, list[SyndromeGraph]]:
    """Restricted syndrome graphs of both sectors for one syndrome."""
    dec = RestrictionDecoder(code, ch, engine="reference")
    bits = s.bits if isinstance(s, Syndrome) else np.asarray(s, dtype=np.uint8).ravel()
    return {sector: dec.restricted_graphs(dec._sector_faces(bits[None, :], sector)[0], sector) for sector in ("Z", "X")}


def restriction_decode(code: StabilizerCode, ch: NoiseChannel, s, engine: str = "pymatching"):
    """Decode one syndrome with the restriction decoder."""
    return RestrictionDecoder(code, ch, engine=engine).decode(s)
