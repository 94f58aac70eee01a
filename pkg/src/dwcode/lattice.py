"""Qubit/face geometries for colour codes and the surface code.

Hexagonal (6.6.6) lattices are described through their dual triangulation:
hexagonal faces sit at points ``(a, b)`` of a triangular lattice and each
qubit is a triangle of three mutually adjacent faces,

* ``up(a, b)``   = faces ``(a, b), (a+1, b), (a, b+1)``
* ``down(a, b)`` = faces ``(a+1, b), (a, b+1), (a+1, b+1)``.

Integer coordinates are ``(3a, 3b)`` for faces, ``(3a+1, 3b+1)`` for up
qubits and ``(3a+2, 3b+2)`` for down qubits (each qubit sits at the centroid
of its triangle, scaled by 3).

For open lattices every boundary is collapsed into one *virtual vertex* of a
single colour. ``qubit_vertices`` lists the three (real or virtual) vertices
around every qubit; ids ``>= num_faces`` are virtual. Decoders use this
vertex picture directly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from math import gcd
from typing import Any

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Color",
    "LatticeKind",
    "BoundaryKind",
    "BoundarySpec",
    "Lattice",
    "LatticeSpec",
    "build_lattice",
    "build_hex_triangular",
    "build_hex_periodic",
    "build_hex_coprime",
    "build_488_triangular",
    "build_square_surface",
]


class Color(IntEnum):
    NONE = -1
    RED = 0
    GREEN = 1
    BLUE = 2


class LatticeKind(str, Enum):
    HEX_666 = "HEX_666"
    SQUARE_SURFACE = "SQUARE_SURFACE"
    LATTICE_488 = "LATTICE_488"


class BoundaryKind(str, Enum):
    OPEN_TRIANGULAR = "OPEN_TRIANGULAR"
    OPEN_SQUARE = "OPEN_SQUARE"
    PERIODIC = "PERIODIC"
    COPRIME_TWISTED = "COPRIME_TWISTED"


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary kind plus identification data.

    ``periods`` are the lattice translations identified to zero for periodic
    cases (in face coordinates ``(a, b)``). ``side_colors`` lists the colour of
    each virtual boundary vertex for open colour-code lattices.
    """

    kind: BoundaryKind
    periods: tuple[tuple[int, int], ...] = ()
    side_colors: tuple[int, ...] = ()


@dataclass(frozen=True)
class LatticeSpec:
    """Compact description from which a lattice can be rebuilt."""

    kind: LatticeKind
    boundary: BoundaryKind
    d: int | None = None
    L1: int | None = None
    L2: int | None = None
    k: int | None = None
    twist: int = 1
    rotated: bool = True


@dataclass(frozen=True, eq=False)
class Lattice:
    """Immutable lattice description.

    Attributes
    ----------
    kind, boundary :
        Lattice family and boundary data.
    coords : ndarray (n, 2)
        Integer qubit coordinates.
    face_colors : ndarray (F,)
        Face colours (``Color.NONE`` for surface codes).
    face_qubits : tuple of ndarray
        Sorted qubit indices of each face.
    face_coords : ndarray (F, 2)
        Integer face coordinates.
    qubit_vertices : ndarray (n, 3) or None
        Real/virtual vertex ids around each qubit (colour codes only).
    vertex_colors : ndarray or None
        Colour of every real and virtual vertex.
    face_roles : tuple of str or None
        ``"X"``/``"Z"`` check type for surface-code faces.
    tags : dict
        Per-qubit integer arrays used by deformation patterns.
    spec : LatticeSpec
    """

    kind: LatticeKind
    boundary: BoundarySpec
    coords: NDArray[np.int64]
    face_colors: NDArray[np.int8]
    face_qubits: tuple[NDArray[np.int64], ...]
    face_coords: NDArray[np.int64]
    spec: LatticeSpec
    qubit_vertices: NDArray[np.int64] | None = None
    vertex_colors: NDArray[np.int8] | None = None
    face_roles: tuple[str, ...] | None = None
    tags: dict[str, NDArray[np.int64]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def num_faces(self) -> int:
        return len(self.face_qubits)

    @property
    def is_color_code(self) -> bool:
        return self.kind in (LatticeKind.HEX_666, LatticeKind.LATTICE_488)

    @property
    def num_virtual(self) -> int:
        if self.vertex_colors is None:
            return 0
        return int(self.vertex_colors.size - self.num_faces)

    def incidence(self) -> NDArray[np.uint8]:
        """Face-by-qubit incidence matrix."""
        H = np.zeros((self.num_faces, self.n), np.uint8)
        for f, qs in enumerate(self.face_qubits):
            H[f, qs] = 1
        return H

    def qubit_faces(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for f, qs in enumerate(self.face_qubits):
            for q in qs:
                out[int(q)].append(f)
        return out

    def face_weights(self) -> NDArray[np.int64]:
        return np.array([len(q) for q in self.face_qubits], dtype=np.int64)

    def is_three_colorable(self) -> bool:
        """True iff no two faces sharing a qubit carry the same colour."""
        if not self.is_color_code:
            return False
        cols = self.face_colors
        for fs in self.qubit_faces():
            c = [int(cols[f]) for f in fs]
            if len(set(c)) != len(c) or any(x < 0 for x in c):
                return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "boundary": {
                "kind": self.boundary.kind.value,
                "periods": [list(p) for p in self.boundary.periods],
                "side_colors": list(self.boundary.side_colors),
            },
            "spec": {k: (v.value if isinstance(v, Enum) else v) for k, v in self.spec.__dict__.items()},
            "qubits": self.coords.tolist(),
            "faces": [
                {
                    "color": int(self.face_colors[f]),
                    "role": None if self.face_roles is None else self.face_roles[f],
                    "coord": self.face_coords[f].tolist(),
                    "qubits": self.face_qubits[f].tolist(),
                }
                for f in range(self.num_faces)
            ],
            "qubit_vertices": None if self.qubit_vertices is None else self.qubit_vertices.tolist(),
            "vertex_colors": None if self.vertex_colors is None else self.vertex_colors.tolist(),
            "tags": {k: v.tolist() for k, v in self.tags.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Lattice":
        b = data["boundary"]
        sp = dict(data["spec"])
        sp["kind"] = LatticeKind(sp["kind"])
        sp["boundary"] = BoundaryKind(sp["boundary"])
        faces = data["faces"]
        roles = [f["role"] for f in faces]
        return cls(
            kind=LatticeKind(data["kind"]),
            boundary=BoundarySpec(
                BoundaryKind(b["kind"]),
                tuple(tuple(p) for p in b["periods"]),
                tuple(b["side_colors"]),
            ),
            coords=np.array(data["qubits"], dtype=np.int64).reshape(-1, 2),
            face_colors=np.array([f["color"] for f in faces], dtype=np.int8),
            face_qubits=tuple(np.array(f["qubits"], dtype=np.int64) for f in faces),
            face_coords=np.array([f["coord"] for f in faces], dtype=np.int64).reshape(-1, 2),
            spec=LatticeSpec(**sp),
            qubit_vertices=None if data["qubit_vertices"] is None else np.array(data["qubit_vertices"], dtype=np.int64),
            vertex_colors=None if data["vertex_colors"] is None else np.array(data["vertex_colors"], dtype=np.int8),
            face_roles=None if all(r is None for r in roles) else tuple(roles),
            tags={k: np.array(v, dtype=np.int64) for k, v in data.get("tags", {}).items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        return cls.from_dict(json.loads(text))


def _finish_color_lattice(
    kind: LatticeKind,
    boundary: BoundarySpec,
    spec: LatticeSpec,
    qubit_keys: list,
    qubit_coords: list,
    qubit_verts: list[tuple],
    face_keys: list,
    face_coords: list,
    face_colors: list[int],
    virtual_colors: list[int],
    tags: dict[str, list[int]],
) -> Lattice:
    """Assemble a colour-code lattice from triangle data.

    ``qubit_verts`` holds, per qubit, three vertex keys; keys of the form
    ``("v", i)`` denote virtual vertex ``i``.
    """
    order = sorted(range(len(qubit_keys)), key=lambda i: qubit_keys[i])
    forder = sorted(range(len(face_keys)), key=lambda i: face_keys[i])
    fidx = {face_keys[i]: r for r, i in enumerate(forder)}
    F = len(face_keys)
    qv = np.zeros((len(order), 3), np.int64)
    members: list[list[int]] = [[] for _ in range(F)]
    for r, i in enumerate(order):
        ids = []
        for v in qubit_verts[i]:
            if isinstance(v, tuple) and len(v) == 2 and v[0] == "v":
                ids.append(F + v[1])
            else:
                ids.append(fidx[v])
        ids.sort()
        qv[r] = ids
        for f in ids:
            if f < F:
                members[f].append(r)
    fcol = np.array([face_colors[i] for i in forder], dtype=np.int8)
    vcol = np.concatenate([fcol, np.array(virtual_colors, dtype=np.int8)])
    return Lattice(
        kind=kind,
        boundary=boundary,
        coords=np.array([qubit_coords[i] for i in order], dtype=np.int64).reshape(-1, 2),
        face_colors=fcol,
        face_qubits=tuple(np.array(sorted(m), dtype=np.int64) for m in members),
        face_coords=np.array([face_coords[i] for i in forder], dtype=np.int64).reshape(-1, 2),
        spec=spec,
        qubit_vertices=qv,
        vertex_colors=vcol,
        tags={k: np.array([v[i] for i in order], dtype=np.int64) for k, v in tags.items()},
    )


def _tri_vertices(a: int, b: int, down: int) -> tuple[tuple[int, int], ...]:
    if down:
        return ((a + 1, b), (a, b + 1), (a + 1, b + 1))
    return ((a, b), (a + 1, b), (a, b + 1))


def build_hex_triangular(d: int) -> Lattice:
    """Distance-``d`` triangular 6.6.6 colour-code lattice.

    The patch is the region ``a-b <= t``, ``a+2b <= t+1``, ``-2a-b <= t+2``
    of the face lattice with ``t = (d-1)/2``. Lattice points on each of the
    three sides are merged into one virtual boundary vertex. Colours are
    ``(a - b - t - 1) mod 3``, which makes the side ``a+2b = t+1`` red, the side
    ``a-b = t`` blue and the side ``-2a-b = t+2`` green.
    """
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise ValueError(f"triangular colour code needs odd d >= 3, got {d!r}")
    d = int(d)
    t = (d - 1) // 2
    K = (t, t + 1, t + 2)

    def status(a: int, b: int):
        g = (a - b, a + 2 * b, -2 * a - b)
        if any(g[i] > K[i] for i in range(3)):
            return None
        on = [i for i in range(3) if g[i] == K[i]]
        if len(on) > 1:
            return "corner"
        return ("v", on[0]) if on else "in"

    def color(a: int, b: int) -> int:
        return (a - b - t - 1) % 3

    R = d + 3
    qkeys, qcoords, qverts = [], [], []
    tags: dict[str, list[int]] = {"a": [], "b": [], "down": []}
    faces: dict[tuple[int, int], int] = {}
    side_col: dict[int, int] = {}
    for a in range(-R, R):
        for b in range(-R, R):
            st = status(a, b)
            if st == "in":
                faces[(a, b)] = color(a, b)
            elif isinstance(st, tuple):
                side_col[st[1]] = color(a, b)
            for down in (0, 1):
                vs = _tri_vertices(a, b, down)
                sts = [status(*v) for v in vs]
                if any(s is None or s == "corner" for s in sts) or "in" not in sts:
                    continue
                qkeys.append((a, b, down))
                qcoords.append((3 * a + 1 + down, 3 * b + 1 + down))
                qverts.append(tuple(v if s == "in" else s for v, s in zip(vs, sts)))
                tags["a"].append(a)
                tags["b"].append(b)
                tags["down"].append(down)
    fkeys = sorted(faces)
    sides = tuple(side_col[i] for i in range(3))
    return _finish_color_lattice(
        LatticeKind.HEX_666,
        BoundarySpec(BoundaryKind.OPEN_TRIANGULAR, (), sides),
        LatticeSpec(LatticeKind.HEX_666, BoundaryKind.OPEN_TRIANGULAR, d=d),
        qkeys,
        qcoords,
        qverts,
        fkeys,
        [(3 * a, 3 * b) for a, b in fkeys],
        [faces[k] for k in fkeys],
        list(sides),
        tags,
    )


def _hex_torus(La: int, Lb: int, shift: int, boundary: BoundarySpec, spec: LatticeSpec) -> Lattice:
    """Hexagonal lattice on the torus with periods ``(La, 0)`` and ``(shift, Lb)``."""

    def canon(a: int, b: int) -> tuple[int, int]:
        q, b = divmod(b, Lb)
        return ((a - q * shift) % La, b)

    qkeys, qcoords, qverts = [], [], []
    tags: dict[str, list[int]] = {"a": [], "b": [], "down": []}
    for a in range(La):
        for b in range(Lb):
            for down in (0, 1):
                vs = tuple(canon(*v) for v in _tri_vertices(a, b, down))
                qkeys.append((a, b, down))
                qcoords.append((3 * a + 1 + down, 3 * b + 1 + down))
                qverts.append(vs)
                tags["a"].append(a)
                tags["b"].append(b)
                tags["down"].append(down)
    fkeys = [(a, b) for a in range(La) for b in range(Lb)]
    return _finish_color_lattice(
        LatticeKind.HEX_666,
        boundary,
        spec,
        qkeys,
        qcoords,
        qverts,
        fkeys,
        [(3 * a, 3 * b) for a, b in fkeys],
        [(a - b) % 3 for a, b in fkeys],
        [],
        tags,
    )


def build_hex_periodic(L: int, L2: int | None = None) -> Lattice:
    """Periodic hexagonal lattice with ``L x L2`` hexagons (``L2`` defaults to ``L``).

    Both dimensions must be multiples of 6: three-colourability needs
    multiples of 3 and the alternating-column deformation needs even sizes.
    """
    L2 = L if L2 is None else L2
    for v in (L, L2):
        if not isinstance(v, (int, np.integer)) or v <= 0 or v % 6:
            raise ValueError(f"periodic hexagonal lattice needs L a positive multiple of 6, got {v!r}")
    L, L2 = int(L), int(L2)
    bnd = BoundarySpec(BoundaryKind.PERIODIC, ((L, 0), (0, L2)))
    spec = LatticeSpec(LatticeKind.HEX_666, BoundaryKind.PERIODIC, L1=L, L2=L2)
    return _hex_torus(L, L2, 0, bnd, spec)


def build_hex_coprime(k: int, twist: int = 1) -> Lattice:
    """Twisted periodic lattice of ``6k x (12k-1)`` hexagons.

    Face ``(a, b + 12k - 1)`` is identified with ``(a + 2*twist, b)`` (and
    ``a`` is periodic with period ``6k``). The shift ``2*twist`` keeps the
    colouring and the alternating-column mask consistent when
    ``twist = 1 (mod 3)``; ``gcd(twist, 3k) = 1`` chains all columns of one
    parity into a single cycle.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"co-prime lattice needs k >= 1, got {k!r}")
    k = int(k)
    if twist % 3 != 1 or gcd(twist, 3 * k) != 1:
        raise ValueError(f"twist must satisfy twist = 1 (mod 3) and gcd(twist, 3k) = 1, got {twist}")
    La, Lb, s = 6 * k, 12 * k - 1, 2 * twist
    bnd = BoundarySpec(BoundaryKind.COPRIME_TWISTED, ((La, 0), (s, Lb)))
    spec = LatticeSpec(LatticeKind.HEX_666, BoundaryKind.COPRIME_TWISTED, L1=La, L2=Lb, k=k, twist=twist)
    return _hex_torus(La, Lb, s, bnd, spec)


def build_488_triangular(d: int) -> Lattice:
    """Triangular 4.8.8 colour-code lattice.

    Built in the dual tetrakis-square picture (doubled coordinates):
    square faces at odd points are red, octagons at even points are green or
    blue by the parity of ``(X + Y) / 2``. The patch is the triangle
    ``Y >= 0``, ``X - Y >= 2``, ``X + Y <= 2d - 2``. The red boundary collapses
    the row of squares below ``Y = 0``; the two diagonal boundaries collapse
    the outer octagons of one colour and drop the outer squares, which leaves
    weight-6 octagons along the diagonals.
    """
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise ValueError(f"4.8.8 triangular code needs odd d >= 3, got {d!r}")
    d = int(d)
    cL, cR = -2, 2 * d - 2

    def col(v: tuple[int, int]) -> int:
        if v[0] % 2:
            return int(Color.RED)
        return int(Color.GREEN) if (v[0] // 2 + v[1] // 2) % 2 == 0 else int(Color.BLUE)

    def region(v: tuple[int, int]) -> str:
        X, Y = v
        if Y < 0:
            return "below"
        if Y - X > cL:
            return "left"
        if Y + X > cR:
            return "right"
        return "in"

    virt = {"below": (0, int(Color.RED)), "left": (1, int(Color.GREEN)), "right": (2, int(Color.BLUE))}

    def mapv(v: tuple[int, int]):
        r = region(v)
        if r == "in":
            return v
        vi, c = virt[r]
        if col(v) != c:
            return None
        if r == "below" and v[1] != -1:
            return None
        return ("v", vi)

    qkeys, qcoords, qverts = [], [], []
    faces: dict[tuple[int, int], int] = {}
    seen = set()
    for i in range(-4, 2 * d + 4, 2):
        for j in range(-4, 2 * d + 4, 2):
            c = (i + 1, j + 1)
            cs = [(i, j), (i + 2, j), (i + 2, j + 2), (i, j + 2)]
            for m in range(4):
                tri = (c, cs[m], cs[(m + 1) % 4])
                mapped = [mapv(v) for v in tri]
                if any(x is None for x in mapped):
                    continue
                if all(isinstance(x, tuple) and x[0] == "v" for x in mapped):
                    continue
                if len(set(mapped)) < 3:
                    continue
                key = tuple(sorted(mapped, key=str))
                if key in seen:
                    continue
                seen.add(key)
                for v, mv in zip(tri, mapped):
                    if mv == v:
                        faces[v] = col(v)
                sx = sum(v[0] for v in tri)
                sy = sum(v[1] for v in tri)
                qkeys.append((sy, sx))
                qcoords.append((sx, sy))
                qverts.append(tuple(mapped))
    sides = (int(Color.RED), int(Color.GREEN), int(Color.BLUE))
    return _finish_488(qkeys, qcoords, qverts, faces, sides, d)


def _finish_488(qkeys, qcoords, qverts, faces, sides, d) -> Lattice:
    # face keys are stored as (Y, X) so ordering is row-major; remap vertex refs
    fkeys = sorted(faces, key=lambda v: (v[1], v[0]))
    remap = {v: (v[1], v[0]) for v in fkeys}
    qv = [tuple(remap.get(x, x) if not (isinstance(x, tuple) and x[0] == "v") else x for x in t) for t in qverts]
    return _finish_color_lattice(
        LatticeKind.LATTICE_488,
        BoundarySpec(BoundaryKind.OPEN_TRIANGULAR, (), sides),
        LatticeSpec(LatticeKind.LATTICE_488, BoundaryKind.OPEN_TRIANGULAR, d=d),
        qkeys,
        qcoords,
        qv,
        [remap[v] for v in fkeys],
        [v for v in fkeys],
        [faces[v] for v in fkeys],
        list(sides),
        {"x": [c[0] for c in qcoords], "y": [c[1] for c in qcoords]},
    )


def build_square_surface(d: int, rotated: bool = True) -> Lattice:
    """Rotated ``d x d`` surface-code lattice.

    Qubits sit at ``(i, j)``; plaquette ``(i, j)`` covers the qubits at its
    four corners ``(i..i+1, j..j+1)`` and is stored with doubled coordinates
    ``(2i+1, 2j+1)``. Bulk plaquettes alternate X/Z checks; weight-2 X checks
    close the top and bottom edges and weight-2 Z checks the left and right.
    """
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"surface code needs d >= 2, got {d!r}")
    if not rotated:
        raise ValueError("only the rotated layout is implemented")
    d = int(d)
    coords = [(i, j) for j in range(d) for i in range(d)]
    index = {c: q for q, c in enumerate(coords)}
    fq, fc, roles = [], [], []
    for j in range(-1, d):
        for i in range(-1, d):
            corners = [(i + di, j + dj) for dj in (0, 1) for di in (0, 1)]
            qs = sorted(index[c] for c in corners if c in index)
            role = "X" if (i + j) % 2 == 0 else "Z"
            if len(qs) == 4:
                pass
            elif len(qs) == 2:
                horizontal_edge = j in (-1, d - 1) and 0 <= i < d - 1
                vertical_edge = i in (-1, d - 1) and 0 <= j < d - 1
                if not ((role == "X" and horizontal_edge) or (role == "Z" and vertical_edge)):
                    continue
            else:
                continue
            fq.append(np.array(qs, dtype=np.int64))
            fc.append((2 * i + 1, 2 * j + 1))
            roles.append(role)
    arr = np.array(coords, dtype=np.int64)
    return Lattice(
        kind=LatticeKind.SQUARE_SURFACE,
        boundary=BoundarySpec(BoundaryKind.OPEN_SQUARE),
        coords=arr,
        face_colors=np.full(len(fq), int(Color.NONE), dtype=np.int8),
        face_qubits=tuple(fq),
        face_coords=np.array(fc, dtype=np.int64),
        spec=LatticeSpec(LatticeKind.SQUARE_SURFACE, BoundaryKind.OPEN_SQUARE, d=d, rotated=True),
        face_roles=tuple(roles),
        tags={"i": arr[:, 0].copy(), "j": arr[:, 1].copy()},
    )


def build_lattice(spec: LatticeSpec) -> Lattice:
    """Rebuild a lattice from its :class:`LatticeSpec`."""
    if spec.kind == LatticeKind.SQUARE_SURFACE:
        return build_square_surface(spec.d, spec.rotated)
    if spec.kind == LatticeKind.LATTICE_488:
        return build_488_triangular(spec.d)
    if spec.boundary == BoundaryKind.OPEN_TRIANGULAR:
        return build_hex_triangular(spec.d)
    if spec.boundary == BoundaryKind.PERIODIC:
        return build_hex_periodic(spec.L1, spec.L2)
    if spec.boundary == BoundaryKind.COPRIME_TWISTED:
        return build_hex_coprime(spec.k, spec.twist)
    raise ValueError(f"unsupported lattice spec {spec}")
