"""Exact maximum-likelihood decoding for small codes.

Every error ``e`` is mapped by a linear quotient map ``Q`` to its coset label
``(syndrome, logical class)``. The ML decoder returns the most probable
logical class for the observed syndrome. Two independent routes compute the
coset probabilities:

* direct enumeration of the stabilizer group for one syndrome
  (:func:`ml_decode`), or of all errors (:func:`exact_logical_rate`);
* a Walsh-Hadamard transform of the product channel that yields the
  probability of every coset at once (:class:`MLDecoder`), used for Monte
  Carlo batches.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .code import BudgetError, StabilizerCode, _gf2_matmul
from .noise import NoiseChannel
from .pauli import PauliOperator, gf2_rref, gf2_solve

__all__ = [
    "Syndrome",
    "DecodeResult",
    "syndrome_of",
    "ml_decode",
    "exact_logical_rate",
    "coset_table",
    "MLDecoder",
    "MalformedSyndromeError",
]


class MalformedSyndromeError(ValueError):
    """The syndrome is not produced by any Pauli error."""


@dataclass(frozen=True, eq=False)
class Syndrome:
    """One bit per generator (1 = flipped check)."""

    bits: NDArray[np.uint8]

    def __post_init__(self) -> None:
        b = (np.asarray(self.bits, dtype=np.int64) & 1).astype(np.uint8).ravel()
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Syndrome):
            return np.array_equal(self.bits, other.bits)
        return np.array_equal(self.bits, np.asarray(other))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())


@dataclass(frozen=True, eq=False)
class DecodeResult:
    """Correction proposed by a decoder."""

    correction: PauliOperator
    logical_class: int
    class_probabilities: NDArray[np.float64] | None = None


def syndrome_of(code: StabilizerCode, error: PauliOperator) -> Syndrome:
    """Bit ``i`` is 1 iff ``error`` anticommutes with generator ``i``."""
    if error.n != code.n:
        raise ValueError(f"error has {error.n} qubits, code has {code.n}")
    return Syndrome(code.syndromes(error.x, error.z)[0])


def _as_syndrome(code: StabilizerCode, s) -> NDArray[np.uint8]:
    b = s.bits if isinstance(s, Syndrome) else (np.asarray(s, dtype=np.int64) & 1).astype(np.uint8).ravel()
    if b.size != code.m:
        raise ValueError(f"syndrome has {b.size} bits, code has {code.m} generators")
    return b


class _Quotient:
    """Quotient map onto (independent syndrome bits, logical class bits).

    Row order is ``[Z_1, X_1, ..., Z_k, X_k, g_i1, g_i2, ...]`` so the low
    ``2k`` bits of a coset index form the class index used by
    :meth:`StabilizerCode.logical_classes` and the high bits the syndrome.
    """

    def __init__(self, code: StabilizerCode) -> None:
        n, k = code.n, code.k
        S = np.hstack([code.gz, code.gx])  # syndrome rows act on [x | z]
        _, piv = gf2_rref(S.T)
        self.indep = np.array(piv, dtype=np.int64)  # independent generator rows
        # generators expressed in the independent ones (for consistency checks)
        rows = []
        for X, Z in code.logical_pairs:
            rows.append(np.concatenate([Z.z, Z.x]))
            rows.append(np.concatenate([X.z, X.x]))
        rows.extend(S[self.indep])
        self.Q = np.array(rows, dtype=np.uint8).reshape(-1, 2 * n)
        self.n, self.k = n, k
        self.r = int(self.indep.size)
        self.N = self.Q.shape[0]
        if self.r + 2 * k != n + k:
            raise ValueError("generator rank inconsistent with k")
        # right inverse: Q @ Rinv = I
        inv = np.zeros((2 * n, self.N), np.uint8)
        for j in range(self.N):
            e = np.zeros(self.N, np.uint8)
            e[j] = 1
            inv[:, j] = gf2_solve(self.Q, e)
        self.Rinv = inv
        self.code = code

    def syndrome_index(self, s: NDArray[np.uint8]) -> NDArray[np.int64]:
        s = np.atleast_2d(s)[:, self.indep].astype(np.int64)
        return (s << np.arange(self.r, dtype=np.int64)).sum(1)

    def pure_errors(self, s: NDArray[np.uint8]) -> NDArray[np.uint8]:
        """Errors with syndrome ``s`` and trivial logical class, shape (shots, 2n)."""
        s = np.atleast_2d(s)
        y = np.zeros((s.shape[0], self.N), np.uint8)
        y[:, 2 * self.k :] = s[:, self.indep]
        e = _gf2_matmul(y, self.Rinv.T)
        # dependent generators must agree
        x, z = e[:, : self.n], e[:, self.n :]
        if not np.array_equal(self.code.syndromes(x, z), s):
            raise MalformedSyndromeError("syndrome is inconsistent with the generator relations")
        return e

    def qubit_contrib(self) -> NDArray[np.int64]:
        """Coset-index contribution of outcome ``o = x + 2z`` on each qubit, shape (n, 4)."""
        n = self.n
        w = np.int64(1) << np.arange(self.N, dtype=np.int64)
        cx = (self.Q[:, :n].astype(np.int64) * w[:, None]).sum(0)
        cz = (self.Q[:, n:].astype(np.int64) * w[:, None]).sum(0)
        return np.stack([np.zeros(n, np.int64), cx, cz, cx ^ cz], axis=1)


def _quotient(code: StabilizerCode) -> _Quotient:
    q = code._cache.get("quotient")
    if q is None:
        q = _Quotient(code)
        code._cache["quotient"] = q
    return q


def _log_table(ch: NoiseChannel, n: int) -> NDArray[np.float64]:
    t = ch.outcome_table(n)
    with np.errstate(divide="ignore"):
        return np.log(t)


def _group_elements(code: StabilizerCode, qt: _Quotient, limit: int) -> NDArray[np.uint8]:
    """All stabilizer-group elements as outcome codes ``x + 2z``, shape (2^r, n)."""
    r = qt.r
    if r > limit:
        raise BudgetError(f"stabilizer group of size 2^{r} exceeds budget 2^{limit}")
    cached = code._cache.get("group")
    if cached is not None:
        return cached
    gens = (code.gx[qt.indep] + 2 * code.gz[qt.indep]).astype(np.uint8)
    G = np.zeros((1 << r, code.n), np.uint8)
    for i in range(r):
        G[1 << i : 1 << (i + 1)] = G[: 1 << i] ^ gens[i]
    code._cache["group"] = G
    return G


def _logsumexp(a: NDArray[np.float64]) -> float:
    m = np.max(a)
    if not np.isfinite(m):
        return -np.inf
    return float(m + np.log(np.exp(a - m).sum()))


def _class_logprobs(code: StabilizerCode, ch: NoiseChannel, e0: NDArray[np.uint8], limit: int) -> NDArray[np.float64]:
    qt = _quotient(code)
    n = code.n
    G = _group_elements(code, qt, limit)
    lt = _log_table(ch, n)
    base = (e0[:n] + 2 * e0[n:]).astype(np.uint8)
    cols = np.arange(n)
    out = np.empty(4**code.k)
    for c in range(4**code.k):
        L = code.class_operator(c)
        shift = base ^ (L.x + 2 * L.z).astype(np.uint8)
        ops = G ^ shift
        lp = lt[cols, ops].sum(1)
        out[c] = _logsumexp(lp)
    return out


def ml_decode(code: StabilizerCode, ch: NoiseChannel, s, budget: int = 22) -> DecodeResult:
    """Exact maximum-likelihood decoding of one syndrome.

    A pure error ``E0`` with syndrome ``s`` and trivial logical class is
    found by linear algebra; for each logical class ``L`` the probability of
    the coset ``E0 L S`` is summed over the whole stabilizer group in the log
    domain. Ties go to the lowest class index.
    """
    bits = _as_syndrome(code, s)
    if code.n - code.k > budget:
        raise BudgetError(f"n - k = {code.n - code.k} exceeds ML budget {budget}")
    qt = _quotient(code)
    e0 = qt.pure_errors(bits)[0]
    lps = _class_logprobs(code, ch, e0, budget)
    c = int(np.argmax(lps))
    L = code.class_operator(c)
    n = code.n
    corr = PauliOperator(e0[:n] ^ L.x, e0[n:] ^ L.z)
    return DecodeResult(corr, c, np.exp(lps))


def _enumerate_errors(ch: NoiseChannel, n: int, budget: int, chunk: int = 1 << 20):
    """Yield ``(outcomes, probs)`` chunks over all errors with nonzero probability."""
    t = ch.outcome_table(n)
    supp = [np.flatnonzero(t[q] > 0) for q in range(n)]
    sizes = np.array([len(s) for s in supp], dtype=np.int64)
    total = int(np.prod(sizes.astype(object)))
    if total > budget:
        raise BudgetError(f"{total} errors exceed enumeration budget {budget}")
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        outs = np.empty((idx.size, n), np.int64)
        rem = idx
        for q in range(n - 1, -1, -1):
            rem, digit = np.divmod(rem, sizes[q])
            outs[:, q] = supp[q][digit]
        probs = np.ones(idx.size)
        for q in range(n):
            probs *= t[q, outs[:, q]]
        yield outs, probs


def coset_table_enumerated(code: StabilizerCode, ch: NoiseChannel, budget: int = 4**13) -> NDArray[np.float64]:
    """Coset probabilities by summing over every error, shape (2^r, 4^k)."""
    qt = _quotient(code)
    contrib = qt.qubit_contrib()
    acc = np.zeros(1 << qt.N)
    cols = np.arange(code.n)
    for outs, probs in _enumerate_errors(ch, code.n, budget):
        y = np.bitwise_xor.reduce(contrib[cols, outs], axis=1)
        acc += np.bincount(y, weights=probs, minlength=acc.size)
    return acc.reshape(1 << qt.r, 4**code.k)


def exact_logical_rate(code: StabilizerCode, ch: NoiseChannel, budget: int = 4**13) -> float:
    """ML failure probability by enumerating all errors.

    For each syndrome the decoder keeps the most probable class; every other
    class of that syndrome counts as failure. The value does not depend on
    how ties are broken.
    """
    P = coset_table_enumerated(code, ch, budget)
    return float((P.sum(1) - P.max(1)).sum())


def _fwht(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """In-place unnormalised Walsh-Hadamard transform of a length-2^N array."""
    n = a.size
    h = 1
    while h < n:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = x - v[:, 1, :]
        h *= 2
    return a


def coset_table(code: StabilizerCode, ch: NoiseChannel, max_bits: int = 24) -> NDArray[np.float64]:
    """Coset probabilities for every (syndrome, class) via the channel's Fourier transform.

    The characteristic function of a product channel factorises over
    qubits, so its pushforward under the quotient map is evaluated on the
    whole dual group and inverted with one Walsh-Hadamard transform.
    Returns an array of shape (2^r, 4^k).
    """
    qt = _quotient(code)
    N, n = qt.N, code.n
    if N > max_bits:
        raise BudgetError(f"coset space of 2^{N} exceeds budget 2^{max_bits}")
    t = ch.outcome_table(n)
    # fhat[q, a + 2b] = sum_o p_q(o) (-1)^(a ox + b oz)
    fhat = np.empty((n, 4))
    sgn = {0: (1, 1, 1, 1), 1: (1, -1, 1, -1), 2: (1, 1, -1, -1), 3: (1, -1, -1, 1)}
    for ab, s in sgn.items():
        fhat[:, ab] = t @ np.array(s, dtype=float)
    # codes of Q^T v restricted to qubit q, for all v
    rowcode = (qt.Q[:, :n] + 2 * qt.Q[:, n:]).astype(np.uint8)  # (N, n)
    F = np.ones(1 << N)
    codes = np.zeros((1 << N,), np.uint8)
    for q in range(n):
        codes[:1] = 0
        for i in range(N):
            codes[1 << i : 1 << (i + 1)] = codes[: 1 << i] ^ rowcode[i, q]
        F *= fhat[q][codes]
    _fwht(F)
    F /= float(1 << N)
    return F.reshape(1 << qt.r, 4**code.k)


class MLDecoder:
    """Batch ML decoder backed by a precomputed coset table.

    Syndromes whose two best classes are closer than ``tol`` in absolute
    probability (where transform round-off could flip the decision) are
    re-decided by exact stabilizer-group enumeration.
    """

    name = "ml"

    def __init__(self, code: StabilizerCode, ch: NoiseChannel, tol: float = 1e-12, budget: int = 22) -> None:
        if code.n - code.k > budget:
            raise BudgetError(f"n - k = {code.n - code.k} exceeds ML budget {budget}")
        self.code, self.ch, self.tol, self.budget = code, ch, tol, budget
        self.qt = _quotient(code)
        self.table = coset_table(code, ch)
        order = np.argsort(-self.table, axis=1, kind="stable")
        self.best = order[:, 0]
        top = np.take_along_axis(self.table, order[:, :2], axis=1) if self.table.shape[1] > 1 else None
        self.fragile = (top[:, 0] - top[:, 1] < tol) if top is not None else np.zeros(len(self.best), bool)
        self._exact: dict[int, int] = {}
        self.exact_calls = 0

    def _class_for(self, sidx: int, s_bits: NDArray[np.uint8]) -> int:
        if not self.fragile[sidx]:
            return int(self.best[sidx])
        if sidx not in self._exact:
            self.exact_calls += 1
            e0 = self.qt.pure_errors(s_bits)[0]
            lps = _class_logprobs(self.code, self.ch, e0, self.budget)
            self._exact[sidx] = int(np.argmax(lps))
        return self._exact[sidx]

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        sidx = self.qt.syndrome_index(s)
        cls = np.array([self._class_for(int(i), s[j]) for j, i in enumerate(sidx)], dtype=np.int64)
        e0 = self.qt.pure_errors(s)
        n = self.code.n
        x, z = e0[:, :n].copy(), e0[:, n:].copy()
        for c in np.unique(cls):
            if c == 0:
                continue
            L = self.code.class_operator(int(c))
            sel = cls == c
            x[sel] ^= L.x
            z[sel] ^= L.z
        return x, z

    def decode(self, s) -> DecodeResult:
        bits = _as_syndrome(self.code, s)
        x, z = self.decode_batch(bits[None, :])
        sidx = int(self.qt.syndrome_index(bits[None, :])[0])
        return DecodeResult(PauliOperator(x[0], z[0]), self._class_for(sidx, bits), self.table[sidx].copy())
