"""Stabilizer codes, Hadamard-mask deformations and code metrics.

Colour codes carry one X-type (primal) and one Z-type (dual) generator per
face. A deformation conjugates every qubit in a binary mask by a Hadamard,
swapping the X and Z bits of all generators and logicals on that qubit.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .lattice import Lattice, LatticeKind, LatticeSpec, BoundaryKind, build_lattice
from .lattice import build_hex_triangular, build_hex_periodic, build_hex_coprime
from .lattice import build_488_triangular, build_square_surface
from .pauli import (
    PauliOperator,
    bits_to_hex,
    gf2_rank,
    gf2_rref,
    hex_to_bits,
    kernel_basis,
    symplectic_products,
)

__all__ = [
    "BudgetError",
    "DeformationSpec",
    "StabilizerCode",
    "DistanceResult",
    "build_css_color_code",
    "build_surface_code",
    "make_deformation",
    "apply_deformation",
    "extract_logicals",
    "count_short_pure_logicals",
    "min_weight_pure_logical",
    "verify_distance",
    "measure_kappa",
    "supported_deformations",
    "make_code",
    "code_from_json",
]


class BudgetError(RuntimeError):
    """Raised when an exhaustive search would exceed its budget."""


def _frac(v: object) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        return Fraction(v).limit_denominator(1000)
    return Fraction(v)


@dataclass(frozen=True, eq=False)
class DeformationSpec:
    """Hadamard mask plus its (kappa, phi) label.

    ``phi`` is stored as a fraction of pi. ``pattern`` is authoritative.
    """

    kappa: Fraction
    phi: Fraction
    pattern: NDArray[np.uint8]
    phase: int = 0

    def __post_init__(self) -> None:
        p = (np.asarray(self.pattern, dtype=np.int64) & 1).astype(np.uint8).ravel()
        p.setflags(write=False)
        object.__setattr__(self, "pattern", p)
        object.__setattr__(self, "kappa", _frac(self.kappa))
        object.__setattr__(self, "phi", _frac(self.phi))

    @classmethod
    def identity(cls, n: int) -> "DeformationSpec":
        return cls(Fraction(0), Fraction(0), np.zeros(n, np.uint8))


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    """Stabilizer code with generators in binary symplectic form.

    Attributes
    ----------
    lattice : Lattice
    gx, gz : ndarray (m, n)
        X and Z parts of the generators.
    gen_face : ndarray (m,)
        Face index of each generator.
    gen_type : ndarray (m,)
        0 for primal (X-type before deformation), 1 for dual.
    logical_pairs : list of (PauliOperator, PauliOperator)
    deformation : DeformationSpec
    d_target : int or None
    family : str
    """

    lattice: Lattice
    gx: NDArray[np.uint8]
    gz: NDArray[np.uint8]
    gen_face: NDArray[np.int64]
    gen_type: NDArray[np.int8]
    logical_pairs: tuple[tuple[PauliOperator, PauliOperator], ...]
    deformation: DeformationSpec
    d_target: int | None = None
    family: str = "css"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for name in ("gx", "gz"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.uint8)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return int(self.gx.shape[1])

    @property
    def m(self) -> int:
        return int(self.gx.shape[0])

    @property
    def k(self) -> int:
        return len(self.logical_pairs)

    @property
    def rank(self) -> int:
        if "rank" not in self._cache:
            self._cache["rank"] = gf2_rank(np.hstack([self.gx, self.gz]))
        return self._cache["rank"]

    @property
    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(self.gx[i], self.gz[i]) for i in range(self.m)]

    @property
    def mask(self) -> NDArray[np.uint8]:
        return self.deformation.pattern

    def logical_matrices(self) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        """Stacked logicals ``[X1..Xk, Z1..Zk]`` as ``(lx, lz)`` arrays of shape (2k, n)."""
        if "logmat" not in self._cache:
            ops = [p[0] for p in self.logical_pairs] + [p[1] for p in self.logical_pairs]
            if ops:
                lx = np.array([o.x for o in ops], dtype=np.uint8)
                lz = np.array([o.z for o in ops], dtype=np.uint8)
            else:
                lx = lz = np.zeros((0, self.n), np.uint8)
            self._cache["logmat"] = (lx, lz)
        return self._cache["logmat"]

    def syndromes(self, x: ArrayLike, z: ArrayLike) -> NDArray[np.uint8]:
        """Syndromes of a batch of errors given as ``(shots, n)`` bit arrays."""
        x = np.atleast_2d(np.asarray(x, dtype=np.uint8))
        z = np.atleast_2d(np.asarray(z, dtype=np.uint8))
        return _gf2_matmul(x, self.gz.T) ^ _gf2_matmul(z, self.gx.T)

    def logical_classes(self, x: ArrayLike, z: ArrayLike) -> NDArray[np.int64]:
        """Logical class index of each residual in a batch.

        For pair ``j`` the class bits are (anticommutes with Z_j, anticommutes
        with X_j), i.e. the presence of X_j and Z_j; the index is
        ``sum_j (xbit_j + 2 zbit_j) 4**j`` so 0 = I, 1 = X, 2 = Z, 3 = Y for k = 1.
        """
        x = np.atleast_2d(np.asarray(x, dtype=np.uint8))
        z = np.atleast_2d(np.asarray(z, dtype=np.uint8))
        lx, lz = self.logical_matrices()
        k = self.k
        anti = _gf2_matmul(x, lz.T) ^ _gf2_matmul(z, lx.T)
        xbits = anti[:, k:].astype(np.int64)
        zbits = anti[:, :k].astype(np.int64)
        w = 4 ** np.arange(k, dtype=np.int64)
        return (xbits * w).sum(1) + 2 * (zbits * w).sum(1)

    def class_operator(self, c: int) -> PauliOperator:
        """Logical operator representing class index ``c``."""
        op = PauliOperator.identity(self.n)
        for j, (X, Z) in enumerate(self.logical_pairs):
            digit = (c >> (2 * j)) & 3
            if digit & 1:
                op = op * X
            if digit & 2:
                op = op * Z
        return op

    def to_dict(self) -> dict[str, Any]:
        sp = self.lattice.spec
        return {
            "family": self.family,
            "n": self.n,
            "k": self.k,
            "d_target": self.d_target,
            "lattice": {k: (v.value if hasattr(v, "value") else v) for k, v in sp.__dict__.items()},
            "kappa": str(self.deformation.kappa),
            "phi": str(self.deformation.phi),
            "phase": self.deformation.phase,
            "mask": bits_to_hex(self.deformation.pattern),
            "generators": [
                {"x": bits_to_hex(self.gx[i]), "z": bits_to_hex(self.gz[i]), "face": int(self.gen_face[i]), "type": int(self.gen_type[i])}
                for i in range(self.m)
            ],
            "logicals": [
                {"X": [bits_to_hex(X.x), bits_to_hex(X.z)], "Z": [bits_to_hex(Z.x), bits_to_hex(Z.z)]}
                for X, Z in self.logical_pairs
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def code_from_json(text: str | dict) -> StabilizerCode:
    """Rebuild a code exported with :meth:`StabilizerCode.to_json`."""
    data = json.loads(text) if isinstance(text, str) else text
    sp = dict(data["lattice"])
    sp["kind"] = LatticeKind(sp["kind"])
    sp["boundary"] = BoundaryKind(sp["boundary"])
    lat = build_lattice(LatticeSpec(**sp))
    n = int(data["n"])
    gens = data["generators"]
    gx = np.array([hex_to_bits(g["x"], n) for g in gens], dtype=np.uint8).reshape(-1, n)
    gz = np.array([hex_to_bits(g["z"], n) for g in gens], dtype=np.uint8).reshape(-1, n)
    pairs = tuple(
        (
            PauliOperator(hex_to_bits(L["X"][0], n), hex_to_bits(L["X"][1], n)),
            PauliOperator(hex_to_bits(L["Z"][0], n), hex_to_bits(L["Z"][1], n)),
        )
        for L in data["logicals"]
    )
    spec = DeformationSpec(Fraction(data["kappa"]), Fraction(data["phi"]), hex_to_bits(data["mask"], n), int(data["phase"]))
    return StabilizerCode(
        lat,
        gx,
        gz,
        np.array([g["face"] for g in gens], dtype=np.int64),
        np.array([g["type"] for g in gens], dtype=np.int8),
        pairs,
        spec,
        data.get("d_target"),
        data.get("family", "css"),
    )


def _gf2_matmul(a: NDArray, b: NDArray) -> NDArray[np.uint8]:
    return ((a.astype(np.int32) @ b.astype(np.int32)) & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# logical operators


def _symplectic_form(u: NDArray, v: NDArray, n: int) -> int:
    return int((np.dot(u[:n].astype(np.int64), v[n:]) + np.dot(u[n:].astype(np.int64), v[:n])) & 1)


def _reduce(v: NDArray, R: NDArray, piv: Sequence[int]) -> NDArray:
    w = v.copy()
    for i, c in enumerate(piv):
        if w[c]:
            w ^= R[i]
    return w


def extract_logicals(gx: ArrayLike, gz: ArrayLike) -> tuple[tuple[PauliOperator, PauliOperator], ...]:
    """Symplectic basis of the normalizer modulo the stabilizer group.

    Candidates are kernel vectors of the symplectic check matrix, reduced
    against the RREF of the generators, taken in kernel-basis order; paired
    by symplectic Gram-Schmidt. For CSS inputs the X logicals are pure X and
    the Z logicals pure Z.
    """
    gx = (np.atleast_2d(np.asarray(gx, dtype=np.int64)) & 1).astype(np.uint8)
    gz = (np.atleast_2d(np.asarray(gz, dtype=np.int64)) & 1).astype(np.uint8)
    n = gx.shape[1]
    if symplectic_products(gx, gz, gx, gz).any():
        raise ValueError("generators do not pairwise commute")
    pure_x = ~gz.any(1)
    pure_z = ~gx.any(1)
    if np.all(pure_x | pure_z):
        return _css_logicals(gx[pure_x], gz[pure_z], n)
    S = np.hstack([gx, gz])
    R, piv = gf2_rref(S)
    R = R[: len(piv)]
    # v = (vx, vz) commutes with row (sx, sz) iff sx.vz + sz.vx = 0
    N = kernel_basis(np.hstack([gz, gx]))
    cands = [_reduce(v, R, piv) for v in N]
    return _gram_schmidt(cands, R, piv, n)


def _gram_schmidt(cands: list[NDArray], R: NDArray, piv: list[int], n: int):
    cands = [c for c in cands if c.any()]
    # keep an independent set modulo the stabilizer
    basis: list[NDArray] = []
    Rb, pb = R.copy(), list(piv)
    for c in cands:
        w = _reduce(c, Rb, pb)
        if w.any():
            basis.append(w)
            Rb, pb = gf2_rref(np.vstack([Rb, w]))
            Rb = Rb[: len(pb)]
    pairs = []
    pool = basis
    while pool:
        u = pool[0]
        j = next((i for i in range(1, len(pool)) if _symplectic_form(u, pool[i], n)), None)
        if j is None:
            raise ValueError("degenerate logical space (isotropic remainder)")
        v = pool[j]
        rest = []
        for i, w in enumerate(pool):
            if i in (0, j):
                continue
            w = w.copy()
            if _symplectic_form(w, v, n):
                w ^= u
            if _symplectic_form(w, u, n):
                w ^= v
            rest.append(w)
        pairs.append((PauliOperator(u[:n], u[n:]), PauliOperator(v[:n], v[n:])))
        pool = rest
    return tuple(pairs)


def _css_logicals(hx: NDArray, hz: NDArray, n: int):
    """Paired pure-X / pure-Z logicals of a CSS code."""

    def quotient(h_comm: NDArray, h_stab: NDArray) -> list[NDArray]:
        R, piv = gf2_rref(h_stab) if h_stab.size else (np.zeros((0, n), np.uint8), [])
        R = R[: len(piv)]
        ker = kernel_basis(h_comm) if h_comm.size else np.eye(n, dtype=np.uint8)
        out = []
        for v in ker:
            w = _reduce(v, R, piv)
            if w.any():
                out.append(w)
                R, piv = gf2_rref(np.vstack([R, w]))
                R = R[: len(piv)]
        return out

    xs = quotient(hz, hx)
    zs = quotient(hx, hz)
    if len(xs) != len(zs):
        raise ValueError("inconsistent CSS logical dimensions")
    # make the overlap matrix the identity: Z' = M^{-T} Z
    X = np.array(xs, dtype=np.uint8).reshape(-1, n)
    Z = np.array(zs, dtype=np.uint8).reshape(-1, n)
    k = X.shape[0]
    if k == 0:
        return ()
    M = _gf2_matmul(X, Z.T)
    aug = np.hstack([M.T, np.eye(k, dtype=np.uint8)])
    Rm, pv = gf2_rref(aug)
    if pv[:k] != list(range(k)):
        raise ValueError("singular logical overlap matrix")
    Minv_T = Rm[:, k:]
    Z2 = _gf2_matmul(Minv_T, Z)
    return tuple(
        (PauliOperator(X[i], np.zeros(n, np.uint8)), PauliOperator(np.zeros(n, np.uint8), Z2[i]))
        for i in range(k)
    )


# ---------------------------------------------------------------------------
# construction


def build_css_color_code(lat: Lattice) -> StabilizerCode:
    """Colour code with an all-X and an all-Z generator on every face."""
    if not lat.is_color_code:
        raise ValueError(f"{lat.kind.value} is not a colour-code lattice")
    H = lat.incidence()
    F = lat.num_faces
    Z0 = np.zeros_like(H)
    gx = np.vstack([H, Z0])
    gz = np.vstack([Z0, H])
    pairs = extract_logicals(gx, gz)
    d = lat.spec.d
    return StabilizerCode(
        lat,
        gx,
        gz,
        np.concatenate([np.arange(F), np.arange(F)]),
        np.concatenate([np.zeros(F, np.int8), np.ones(F, np.int8)]),
        pairs,
        DeformationSpec.identity(lat.n),
        d,
        "css",
    )


def build_surface_code(lat: Lattice) -> StabilizerCode:
    """CSS surface code with one generator per face, typed by its role."""
    if lat.kind != LatticeKind.SQUARE_SURFACE:
        raise ValueError("surface code needs a SQUARE_SURFACE lattice")
    H = lat.incidence()
    roles = np.array([r == "Z" for r in lat.face_roles])
    gx = np.where(roles[:, None], 0, H).astype(np.uint8)
    gz = np.where(roles[:, None], H, 0).astype(np.uint8)
    pairs = extract_logicals(gx, gz)
    return StabilizerCode(
        lat,
        gx,
        gz,
        np.arange(lat.num_faces),
        roles.astype(np.int8),
        pairs,
        DeformationSpec.identity(lat.n),
        lat.spec.d,
        "surface",
    )


def apply_deformation(code: StabilizerCode, spec: DeformationSpec) -> StabilizerCode:
    """Conjugate by Hadamards on the masked qubits (relative to ``code``).

    The result carries ``spec`` combined (XOR) with the existing mask, so
    applying the same mask twice returns the original code.
    """
    m = spec.pattern.astype(bool)
    if m.size != code.n:
        raise ValueError(f"mask length {m.size} != code length {code.n}")
    gx = code.gx.copy()
    gz = code.gz.copy()
    gx[:, m], gz[:, m] = code.gz[:, m], code.gx[:, m]

    def swap(P: PauliOperator) -> PauliOperator:
        x, z = P.x.copy(), P.z.copy()
        x[m], z[m] = P.z[m], P.x[m]
        return PauliOperator(x, z)

    pairs = tuple((swap(X), swap(Z)) for X, Z in code.logical_pairs)
    total = code.deformation.pattern ^ spec.pattern
    if not total.any():
        new_spec = DeformationSpec.identity(code.n)
    else:
        new_spec = replace(spec, pattern=total)
    fam = code.family if not total.any() else _family_label(code.family, new_spec)
    return StabilizerCode(code.lattice, gx, gz, code.gen_face, code.gen_type, pairs, new_spec, code.d_target, fam)


def _family_label(base: str, spec: DeformationSpec) -> str:
    if base.startswith("surface"):
        return "xzzx" if spec.kappa == 1 else f"surface-dw({spec.kappa},{spec.phi}pi)"
    if spec.kappa == 1 and spec.phi == Fraction(1, 6):
        return "x3z3"
    return f"dw({spec.kappa},{spec.phi}pi)"


# ---------------------------------------------------------------------------
# deformation patterns
#
# Each (kappa, phi) pair is a periodic stripe pattern over an integer
# transverse functional u of the qubits. ``unit`` is the number of u-steps
# per unit distance, so measured kappa = walls per period / (period / unit).

_HEX_PATTERNS: dict[tuple[Fraction, Fraction], tuple[str, tuple[int, ...]]] = {
    (Fraction(1), Fraction(1, 6)): ("col", (1, 0)),
    (Fraction(2), Fraction(1, 2)): ("col2", (1, 0)),
    (Fraction(1, 2), Fraction(0)): ("diag", (1, 1, 1, 1, 0, 0, 0, 0)),
    (Fraction(2, 3), Fraction(0)): ("diag", (1, 1, 1, 0, 0, 0)),
    (Fraction(3, 2), Fraction(0)): ("diag", (1, 0, 1, 0, 1, 1, 0, 0)),
}
_SQUARE_PATTERNS = {(Fraction(1), Fraction(1, 4)): ("anti", (1, 0))}
_488_PATTERNS = {(Fraction(1), Fraction(1, 4)): ("cell", (1, 0))}
_UNIT = {"col": 1, "col2": 2, "diag": 2, "anti": 1, "cell": 1}
_KNOWN_PERIODS = {"col": (2,), "col2": (2,), "diag": (6, 8), "anti": (2,), "cell": (2,)}


def _functional(lat: Lattice, name: str) -> NDArray[np.int64] | None:
    t = lat.tags
    if name == "col" and "a" in t:
        return t["a"].copy()
    if name == "col2" and "a" in t:
        return 2 * t["a"] + t["down"]
    if name == "diag" and "a" in t:
        return t["a"] - t["b"]
    if name == "anti" and "i" in t:
        return t["i"] + t["j"]
    if name == "cell" and "x" in t:
        cx = np.rint(t["x"] / 3).astype(np.int64)
        cy = np.rint(t["y"] / 3).astype(np.int64)
        return (cx + cy) // 2
    return None


def _period_of(lat: Lattice, name: str) -> int | None:
    """Period of the functional on periodic lattices (None when open)."""
    b = lat.boundary
    if not b.periods:
        return None
    per = 0
    for pa, pb in b.periods:
        if name == "col":
            v = pa
        elif name == "col2":
            v = 2 * pa
        elif name == "diag":
            v = pa - pb
        else:
            return None
        per = math.gcd(per, abs(v))
    return per


def supported_deformations(lat: Lattice) -> list[tuple[Fraction, Fraction]]:
    table = _pattern_table(lat)
    return [(Fraction(0), Fraction(0))] + list(table)


def _pattern_table(lat: Lattice):
    if lat.kind == LatticeKind.HEX_666:
        return _HEX_PATTERNS
    if lat.kind == LatticeKind.SQUARE_SURFACE:
        return _SQUARE_PATTERNS
    return _488_PATTERNS


def _stripe_mask(lat: Lattice, name: str, pattern: Sequence[int], phase: int) -> NDArray[np.uint8]:
    u = _functional(lat, name)
    if u is None:
        raise ValueError(f"pattern family {name!r} not available on {lat.kind.value}")
    P = len(pattern)
    per = _period_of(lat, name)
    if per is not None and per % P:
        raise ValueError(f"stripe period {P} incompatible with lattice period {per}")
    # anchor: open lattices at their maximum (a boundary line for the
    # diagonal family), periodic lattices at zero
    anchor = 0 if per is not None else int(u.max())
    idx = (u - anchor + phase) % P
    return np.asarray(pattern, dtype=np.uint8)[idx]


def make_deformation(lat: Lattice, kappa: object, phi: object = 0, phase: int | None = None) -> DeformationSpec:
    """Hadamard mask for DW(kappa, phi) on ``lat``.

    ``phi`` is given as a fraction of pi. ``phase`` shifts the stripe
    pattern; by default it minimises the number of short pure logicals on
    small open lattices (see :func:`default_phase`).
    """
    kap, ph = _frac(kappa), _frac(phi)
    if kap == 0:
        return DeformationSpec(Fraction(0), ph, np.zeros(lat.n, np.uint8))
    table = _pattern_table(lat)
    if (kap, ph) not in table:
        raise ValueError(f"unsupported deformation (kappa={kap}, phi={ph}pi) on {lat.kind.value}; supported: {sorted(table)}")
    name, pattern = table[(kap, ph)]
    if phase is None:
        phase = default_phase(lat, kap, ph)
    return DeformationSpec(kap, ph, _stripe_mask(lat, name, pattern, phase), phase)


def default_phase(lat: Lattice, kappa: Fraction, phi: Fraction) -> int:
    """Phase 0 minimises short pure logicals for every family.

    Verified by exhaustive counting on the triangular d = 5, 7, 9 lattices
    (frozen in the test suite).
    """
    return 0


def measure_kappa(lat: Lattice, pattern: ArrayLike) -> Fraction | None:
    """Domain walls per unit distance of a stripe mask.

    The mask is binned along each transverse functional of the lattice. On
    the first functional where it is constant per bin and periodic with one
    of the stripe periods, the walls inside one full period window are
    counted. Returns ``None`` when no functional describes the mask.
    """
    m = (np.asarray(pattern, dtype=np.int64) & 1).ravel()
    if not m.any():
        return Fraction(0)
    names = {
        LatticeKind.HEX_666: ("col", "col2", "diag"),
        LatticeKind.SQUARE_SURFACE: ("anti",),
        LatticeKind.LATTICE_488: ("cell",),
    }
    for name in names[lat.kind]:
        u = _functional(lat, name)
        if u is None:
            continue
        per = _period_of(lat, name)
        if per is not None:
            u = u % per
        lo = int(u.min())
        N = int(u.max()) - lo + 1
        seq = np.full(N, -1)
        seq[u - lo] = m
        counts = np.bincount(u - lo, weights=m, minlength=N)
        sizes = np.bincount(u - lo, minlength=N)
        if (seq < 0).any() or not np.all((counts == 0) | (counts == sizes)):
            continue
        for P in _KNOWN_PERIODS[name]:
            if per is not None:
                if per % P:
                    continue
                window = np.concatenate([seq, seq[:1]])
            else:
                if N < P + 2 or not np.array_equal(seq[:-P], seq[P:]):
                    continue
                window = seq[: P + 1]
            if per is not None and not np.array_equal(seq, np.roll(seq, P)):
                continue
            steps = len(window) - 1
            walls = int(np.count_nonzero(window[:-1] != window[1:]))
            return Fraction(walls * _UNIT[name], steps)
    return None


# ---------------------------------------------------------------------------
# metrics


def _pack_rows(M: NDArray[np.uint8]) -> NDArray[np.uint64]:
    """Pack the columns of ``M`` (bits along axis 0) into uint64 words per column."""
    m, n = M.shape
    W = max(1, (m + 63) // 64)
    out = np.zeros((n, W), np.uint64)
    for i in range(m):
        w, b = divmod(i, 64)
        out[:, w] |= M[i].astype(np.uint64) << np.uint64(b)
    return out


def _span_enumerate(basis: NDArray[np.uint8], cap: int, limit: int = 1 << 26) -> tuple[int, NDArray[np.uint8] | None]:
    """Count nonzero span elements of weight <= cap; return count and one lightest."""
    basis = np.asarray(basis, dtype=np.uint8).reshape(-1, basis.shape[-1] if basis.ndim == 2 else 0)
    r = basis.shape[0]
    if r == 0 or cap <= 0:
        return 0, None
    if r > 40 or (1 << r) > limit * 4:
        raise BudgetError(f"span of dimension {r} exceeds enumeration budget")
    n = basis.shape[1]
    packed = _pack_rows(basis.T)  # (r, W) each basis vector packed
    W = packed.shape[1]
    lo = min(r, 16)
    hi = r - lo
    # table of all combinations of the first `lo` vectors
    tab = np.zeros((1 << lo, W), np.uint64)
    for i in range(lo):
        tab[1 << i : 1 << (i + 1)] = tab[: 1 << i] ^ packed[i]
    count = 0
    best_w, best_vec = None, None
    high = np.zeros(W, np.uint64)
    for h in range(1 << hi):
        if h:
            # Gray-code step over the high vectors
            bit = (h & -h).bit_length() - 1
            high = high ^ packed[lo + bit]
        vals = tab ^ high
        wts = np.bitwise_count(vals).sum(1)
        sel = (wts <= cap) & (wts > 0)
        c = int(np.count_nonzero(sel))
        if c:
            count += c
            i = int(np.flatnonzero(sel)[np.argmin(wts[sel])])
            if best_w is None or wts[i] < best_w:
                best_w = int(wts[i])
                best_vec = vals[i].copy()
    vec = None
    if best_vec is not None:
        vec = np.zeros(n, np.uint8)
        for q in range(n):
            w, b = divmod(q, 64)
            vec[q] = (int(best_vec[w]) >> b) & 1
    return count, vec


def _independent_rows(M: NDArray[np.uint8]) -> NDArray[np.uint8]:
    R, piv = gf2_rref(M)
    return R[: len(piv)]


def count_short_pure_logicals(code: StabilizerCode, pauli_type: str, weight_cap: int) -> int:
    """Number of pure-X (or pure-Z) logical operators of weight <= ``weight_cap``.

    Pure operators commuting with every generator form a linear space; its
    elements of weight <= cap are counted by enumeration, minus those lying
    in the stabilizer group (the pure subgroup is enumerated the same way).
    """
    t = pauli_type.upper()
    if t not in ("X", "Z"):
        raise ValueError("pauli_type must be 'X' or 'Z'")
    if weight_cap <= 0:
        return 0
    # a pure-X operator x commutes with generator g iff g.z . x = 0
    comm = code.gz if t == "X" else code.gx
    other = code.gx if t == "X" else code.gz
    ker = kernel_basis(comm)
    # stabilizer elements c.G with vanishing opposite part: c in left kernel of comm
    left = kernel_basis(comm.T)
    pure_stab = _gf2_matmul(left, other) if left.size else np.zeros((0, code.n), np.uint8)
    pure_stab = _independent_rows(pure_stab) if pure_stab.size else pure_stab
    total, _ = _span_enumerate(ker, weight_cap)
    stab, _ = _span_enumerate(pure_stab, weight_cap) if pure_stab.shape[0] else (0, None)
    return total - stab


def min_weight_pure_logical(code: StabilizerCode, pauli_type: str, max_dim: int = 22) -> PauliOperator:
    """Lightest pure-X (or pure-Z) operator that commutes with the code but is not a stabilizer.

    The commuting pure operators are enumerated exhaustively, so the kernel
    dimension must not exceed ``max_dim``; ties go to the first element in
    enumeration order.
    """
    t = pauli_type.upper()
    if t not in ("X", "Z"):
        raise ValueError("pauli_type must be 'X' or 'Z'")
    comm = code.gz if t == "X" else code.gx
    ker = kernel_basis(comm)
    if ker.shape[0] > max_dim:
        raise BudgetError(f"pure kernel of dimension {ker.shape[0]} exceeds max_dim={max_dim}")
    span = np.zeros((1, code.n), np.uint8)
    for row in ker:
        span = np.vstack([span, span ^ row])
    zero = np.zeros_like(span)
    cls = code.logical_classes(span, zero) if t == "X" else code.logical_classes(zero, span)
    cand = np.flatnonzero(cls != 0)
    if cand.size == 0:
        raise ValueError(f"code has no pure-{t} logical operator")
    best = cand[np.argmin(span[cand].sum(axis=1))]
    v = span[best]
    return PauliOperator(v, np.zeros_like(v)) if t == "X" else PauliOperator(np.zeros_like(v), v)


@dataclass(frozen=True)
class DistanceResult:
    passed: bool
    d_target: int
    witness: PauliOperator | None = None
    weight: int | None = None

    def __bool__(self) -> bool:
        return self.passed


def verify_distance(code: StabilizerCode, d_target: int, budget: int = 50_000_000) -> DistanceResult:
    """Exhaustively check that no logical operator has weight < ``d_target``.

    Every Pauli of weight ``w < d_target`` is enumerated (by support and
    per-qubit type) in increasing ``w``; the first one with trivial syndrome
    that anticommutes with a logical is returned as the witness.
    """
    n = code.n
    total = sum(math.comb(n, w) * 3**w for w in range(1, d_target))
    if total > budget:
        raise BudgetError(f"{total} candidate operators exceed budget {budget}")
    lx, lz = code.logical_matrices()
    # columns: syndrome bits then logical anticommutation bits, per single-qubit Pauli
    rows_x = np.vstack([code.gz, lz])  # X on qubit q flips rows with z-part on q
    rows_z = np.vstack([code.gx, lx])
    m = code.m
    colx = _pack_rows(rows_x)
    colz = _pack_rows(rows_z)
    cols = np.stack([colx, colz, colx ^ colz])  # X, Z, Y
    W = colx.shape[1]
    syn_mask = np.zeros(W, np.uint64)
    for i in range(m):
        w, b = divmod(i, 64)
        syn_mask[w] |= np.uint64(1) << np.uint64(b)
    for w in range(1, d_target):
        for sup in _combinations_chunks(n, w):
            for types in itertools.product(range(3), repeat=w):
                acc = np.zeros((sup.shape[0], W), np.uint64)
                for j, tp in enumerate(types):
                    acc ^= cols[tp][sup[:, j]]
                syn_zero = ~((acc & syn_mask).any(1))
                logical = (acc & ~syn_mask).any(1)
                hit = np.flatnonzero(syn_zero & logical)
                if hit.size:
                    s = sup[hit[0]]
                    x = np.zeros(n, np.uint8)
                    z = np.zeros(n, np.uint8)
                    for q, tp in zip(s, types):
                        if tp in (0, 2):
                            x[q] = 1
                        if tp in (1, 2):
                            z[q] = 1
                    return DistanceResult(False, d_target, PauliOperator(x, z), w)
    return DistanceResult(True, d_target)


def _combinations_chunks(n: int, w: int, chunk: int = 200_000):
    it = itertools.combinations(range(n), w)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


# ---------------------------------------------------------------------------
# convenience constructors


def make_code(
    family: str,
    d: int | None = None,
    L: int | None = None,
    k: int | None = None,
    kappa: object | None = None,
    phi: object | None = None,
    phase: int | None = None,
    twist: int = 1,
) -> StabilizerCode:
    """Build a code by family name.

    Families: ``css`` / ``x3z3`` / ``dw`` (triangular hexagonal, ``d``),
    ``css-periodic`` / ``x3z3-periodic`` (``L``), ``css-coprime`` /
    ``x3z3-coprime`` (``k``), ``css-488`` / ``dw-488`` (``d``),
    ``surface`` / ``xzzx`` (rotated, ``d``).
    """
    fam = family.lower()
    if fam in ("surface", "surface-css", "xzzx"):
        code = build_surface_code(build_square_surface(d))
        if fam == "xzzx":
            kappa, phi = 1, Fraction(1, 4)
    else:
        if fam.endswith("-periodic"):
            lat = build_hex_periodic(L)
        elif fam.endswith("-coprime"):
            lat = build_hex_coprime(k, twist)
        elif fam.endswith("-488"):
            lat = build_488_triangular(d)
        else:
            lat = build_hex_triangular(d)
        code = build_css_color_code(lat)
        if fam.startswith("x3z3"):
            kappa, phi = 1, Fraction(1, 6)
    if kappa is None or _frac(kappa) == 0:
        return code
    spec = make_deformation(code.lattice, kappa, 0 if phi is None else phi, phase)
    return apply_deformation(code, spec)
