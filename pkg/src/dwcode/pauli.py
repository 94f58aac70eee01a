"""Phase-free Pauli operators and GF(2) linear algebra.

Pauli operators are stored in the binary symplectic picture: qubit ``i``
carries X iff ``x[i]`` and Z iff ``z[i]`` (Y iff both). Bit vectors are
``uint8`` numpy arrays; hex serialisation packs them into bytes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "PauliOperator",
    "BinaryMatrix",
    "NO_SOLUTION",
    "multiply",
    "commutes",
    "gf2_rank",
    "gf2_rref",
    "gf2_solve",
    "gf2_right_inverse",
    "kernel_basis",
    "row_space_member",
    "bits_to_hex",
    "hex_to_bits",
    "symplectic_products",
]

#: Returned by :func:`gf2_solve` when the right-hand side is outside the column space.
NO_SOLUTION = None

_LABEL = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LABEL.items()}


def _as_bits(v: ArrayLike) -> NDArray[np.uint8]:
    return (np.asarray(v, dtype=np.int64) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """An n-qubit Pauli operator modulo phase.

    Parameters
    ----------
    x, z : array_like of {0, 1}
        X and Z bit vectors of equal length.
    """

    x: NDArray[np.uint8]
    z: NDArray[np.uint8]

    def __post_init__(self) -> None:
        x = _as_bits(self.x).ravel()
        z = _as_bits(self.z).ravel()
        if x.shape != z.shape:
            raise ValueError(f"x and z bit lengths differ: {x.size} vs {z.size}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Build from a string such as ``"XIZY"``."""
        try:
            bits = [_BITS[c] for c in label.upper()]
        except KeyError as exc:
            raise ValueError(f"invalid Pauli label {label!r}") from exc
        arr = np.array(bits, dtype=np.uint8).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOperator":
        """Single-qubit Pauli ``kind`` in {"X", "Y", "Z"} on ``qubit``."""
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        xb, zb = _BITS[kind.upper()]
        x[qubit], z[qubit] = xb, zb
        return cls(x, z)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int], kind: str) -> "PauliOperator":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        xb, zb = _BITS[kind.upper()]
        idx = list(support)
        x[idx], z[idx] = xb, zb
        return cls(x, z)

    def label(self) -> str:
        return "".join(_LABEL[(int(a), int(b))] for a, b in zip(self.x, self.z))

    def symplectic(self) -> NDArray[np.uint8]:
        """Concatenated vector ``[x | z]`` of length 2n."""
        return np.concatenate([self.x, self.z])

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        lab = self.label() if self.n <= 40 else f"<{self.n} qubits, weight {self.weight}>"
        return f"PauliOperator({lab})"


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Phase-free product: componentwise XOR of the bit vectors."""
    _check_dims(a, b)
    return PauliOperator(a.x ^ b.x, a.z ^ b.z)


def commutes(a: PauliOperator, b: PauliOperator) -> int:
    """Return 1 if ``a`` and ``b`` commute, else 0."""
    _check_dims(a, b)
    s = int(np.count_nonzero(a.x & b.z) + np.count_nonzero(a.z & b.x)) & 1
    return 1 - s


def symplectic_products(ax: NDArray, az: NDArray, bx: NDArray, bz: NDArray) -> NDArray[np.uint8]:
    """Matrix of symplectic inner products between row sets A and B.

    Entry ``(i, j)`` is 1 iff row ``i`` of A anticommutes with row ``j`` of B.
    """
    ax = np.atleast_2d(ax).astype(np.int64)
    az = np.atleast_2d(az).astype(np.int64)
    bx = np.atleast_2d(bx).astype(np.int64)
    bz = np.atleast_2d(bz).astype(np.int64)
    return ((ax @ bz.T + az @ bx.T) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Dense matrix over GF(2)."""

    bits: NDArray[np.uint8]

    def __post_init__(self) -> None:
        b = _as_bits(self.bits)
        if b.ndim != 2:
            b = b.reshape(b.shape[0] if b.ndim else 0, -1)
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def rows(self) -> int:
        return int(self.bits.shape[0])

    @property
    def cols(self) -> int:
        return int(self.bits.shape[1])

    @property
    def rank(self) -> int:
        return gf2_rank(self.bits)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    def __matmul__(self, v: ArrayLike) -> NDArray[np.uint8]:
        return ((self.bits.astype(np.int64) @ np.asarray(v, dtype=np.int64)) & 1).astype(np.uint8)


def _mat(A: BinaryMatrix | ArrayLike) -> NDArray[np.uint8]:
    if isinstance(A, BinaryMatrix):
        return A.bits.copy()
    M = _as_bits(A)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    return M.copy()


def gf2_rref(A: BinaryMatrix | ArrayLike) -> tuple[NDArray[np.uint8], list[int]]:
    """Reduced row echelon form over GF(2).

    Returns
    -------
    R : ndarray
        The reduced matrix (same shape as ``A``).
    pivots : list of int
        Pivot column of each nonzero row, in order.
    """
    M = _mat(A)
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        hit = np.flatnonzero(M[:, c])
        hit = hit[hit != r]
        if hit.size:
            M[hit] ^= M[r]
        pivots.append(c)
        r += 1
    return M, pivots


def gf2_rank(A: BinaryMatrix | ArrayLike) -> int:
    """Rank over GF(2)."""
    M = _mat(A)
    if M.size == 0:
        return 0
    return len(gf2_rref(M)[1])


def gf2_solve(A: BinaryMatrix | ArrayLike, b: ArrayLike) -> NDArray[np.uint8] | None:
    """Return some ``x`` with ``A x = b`` over GF(2), or ``NO_SOLUTION``.

    Free variables are set to zero, so the result is deterministic.
    """
    M = _mat(A)
    bb = _as_bits(b).ravel()
    if M.shape[0] != bb.size:
        raise ValueError(f"A has {M.shape[0]} rows but b has length {bb.size}")
    aug = np.concatenate([M, bb[:, None]], axis=1)
    R, piv = gf2_rref(aug)
    cols = M.shape[1]
    if cols in piv:
        return NO_SOLUTION
    x = np.zeros(cols, np.uint8)
    for i, c in enumerate(piv):
        x[c] = R[i, cols]
    return x


def gf2_right_inverse(A: BinaryMatrix | ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
    """Right inverse on the column space plus consistency rows.

    Returns ``(P, check)`` such that ``A (P b) = b`` whenever ``check b = 0``,
    and ``check b != 0`` exactly when ``b`` is outside the column space of ``A``.
    """
    A = _mat(A)
    m, n = A.shape
    aug = np.hstack([A, np.eye(m, dtype=np.uint8)])
    R, piv = gf2_rref(aug)
    piv_a = [p for p in piv if p < n]
    rank = len(piv_a)
    # rows of R: [U | T] with T A = U; solution x[piv_i] = (T b)_i for i < rank
    T = R[:, n:]
    P = np.zeros((n, m), np.uint8)
    for i, c in enumerate(piv_a):
        P[c] = T[i]
    check = T[rank:]
    return P, check


def kernel_basis(A: BinaryMatrix | ArrayLike) -> NDArray[np.uint8]:
    """Basis of the right null space ``{x : A x = 0}`` as rows of a matrix."""
    M = _mat(A)
    cols = M.shape[1]
    R, piv = gf2_rref(M)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(piv):
            basis[k, c] = R[i, f]
    return basis


def row_space_member(R: NDArray[np.uint8], pivots: Sequence[int], v: ArrayLike) -> bool:
    """Test whether ``v`` lies in the row space of an RREF matrix ``R``."""
    w = _as_bits(v).ravel().copy()
    for i, c in enumerate(pivots):
        if w[c]:
            w ^= R[i]
    return not w.any()


def bits_to_hex(bits: ArrayLike) -> str:
    """Pack a bit vector (first bit most significant) into a hex string."""
    b = _as_bits(bits).ravel()
    return np.packbits(b).tobytes().hex()


def hex_to_bits(h: str, n: int) -> NDArray[np.uint8]:
    """Inverse of :func:`bits_to_hex` for a vector of length ``n``."""
    raw = np.frombuffer(bytes.fromhex(h), dtype=np.uint8)
    return np.unpackbits(raw)[:n].astype(np.uint8)
