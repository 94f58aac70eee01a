"""Biased independent Pauli noise.

The bias is ``eta = p_Z / (p_X + p_Y)`` with ``p_X = p_Y``; ``eta = 0.5`` is
depolarizing and ``eta = inf`` pure dephasing. ``eta`` is kept exact (a
``Fraction`` or ``math.inf``) so the infinite-bias regime is never
approximated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .pauli import PauliOperator

__all__ = [
    "Eta",
    "parse_eta",
    "format_eta",
    "channel_probs",
    "NoiseChannel",
    "sample_error",
    "sample_errors",
    "effective_permuted_channel",
]

Eta = Union[Fraction, float]


def parse_eta(eta: object) -> Eta:
    """Convert a bias value or token (``"inf"``) to its exact form."""
    if isinstance(eta, str):
        tok = eta.strip().lower()
        if tok in ("inf", "infinity", "∞"):
            return math.inf
        eta = Fraction(tok)
    if isinstance(eta, float) and math.isinf(eta):
        if eta < 0:
            raise ValueError("eta must be >= 0.5")
        return math.inf
    if isinstance(eta, float):
        eta = Fraction(str(eta))
    e = Fraction(eta)
    if e < Fraction(1, 2):
        raise ValueError(f"eta must be >= 0.5 or inf, got {eta}")
    return e


def format_eta(eta: Eta) -> str:
    if eta == math.inf:
        return "inf"
    e = Fraction(eta)
    return str(e.numerator) if e.denominator == 1 else str(float(e))


def channel_probs(p: float, eta: object) -> tuple[float, float, float]:
    """Return ``(p_X, p_Y, p_Z)`` for total error rate ``p`` and bias ``eta``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    e = parse_eta(eta)
    if e == math.inf:
        return 0.0, 0.0, p
    e = Fraction(e)
    px = p / (2.0 * float(1 + e))
    pz = p * float(e / (1 + e))
    return px, px, pz


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """Independent single-qubit Pauli channel.

    Parameters
    ----------
    p : float
        Total error probability per qubit.
    eta : Fraction or inf
        Bias of the uniform channel.
    per_qubit : ndarray (n, 3), optional
        Site-dependent ``(p_X, p_Y, p_Z)`` overriding the uniform channel.
    """

    p: float
    eta: Eta
    per_qubit: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", parse_eta(self.eta))
        channel_probs(self.p, self.eta)
        if self.per_qubit is not None:
            pq = np.array(self.per_qubit, dtype=np.float64).reshape(-1, 3)
            if (pq < 0).any() or (pq.sum(1) > 1 + 1e-12).any():
                raise ValueError("per-qubit probabilities must be non-negative and sum to <= 1")
            pq.setflags(write=False)
            object.__setattr__(self, "per_qubit", pq)

    @property
    def probs(self) -> tuple[float, float, float]:
        return channel_probs(self.p, self.eta)

    def table(self, n: int) -> NDArray[np.float64]:
        """Per-qubit ``(p_X, p_Y, p_Z)`` array of shape ``(n, 3)``."""
        if self.per_qubit is not None:
            if self.per_qubit.shape[0] != n:
                raise ValueError(f"channel defined on {self.per_qubit.shape[0]} qubits, not {n}")
            return self.per_qubit
        return np.tile(np.array(self.probs), (n, 1))

    def outcome_table(self, n: int) -> NDArray[np.float64]:
        """Per-qubit probabilities of I, X, Z, Y indexed by ``x + 2 z``."""
        t = self.table(n)
        out = np.empty((n, 4))
        out[:, 1] = t[:, 0]
        out[:, 3] = t[:, 1]
        out[:, 2] = t[:, 2]
        out[:, 0] = 1.0 - t.sum(1)
        return out

    def marginals(self, n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Probabilities that each qubit carries an X component and a Z component."""
        t = self.table(n)
        return t[:, 0] + t[:, 1], t[:, 2] + t[:, 1]

    @property
    def is_infinite_bias(self) -> bool:
        return self.per_qubit is None and self.eta == math.inf


def sample_errors(ch: NoiseChannel, n: int, rng: np.random.Generator, shots: int) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
    """Sample ``shots`` i.i.d. errors as ``(x, z)`` bit arrays of shape ``(shots, n)``.

    A single uniform ``r`` per qubit decides the outcome:
    X if ``r < p_X``, Y if ``p_X <= r < p_X + p_Y``, Z if ``p_X + p_Y <= r < p``.
    """
    t = ch.table(n)
    c1 = t[:, 0]
    c2 = c1 + t[:, 1]
    c3 = c2 + t[:, 2]
    r = rng.random((shots, n))
    x = (r < c2).astype(np.uint8)
    z = ((r >= c1) & (r < c3)).astype(np.uint8)
    return x, z


def sample_error(ch: NoiseChannel, n: int, rng: np.random.Generator) -> PauliOperator:
    """Sample a single error; deterministic given the generator state."""
    x, z = sample_errors(ch, n, rng, 1)
    return PauliOperator(x[0], z[0])


def effective_permuted_channel(ch: NoiseChannel, mask: ArrayLike) -> NoiseChannel:
    """Per-qubit channel with ``p_X`` and ``p_Z`` swapped on masked qubits.

    ``mask`` may be a bit array or any object with a ``pattern`` attribute.
    """
    m = np.asarray(getattr(mask, "pattern", mask), dtype=bool).ravel()
    t = ch.table(m.size).copy() if ch.per_qubit is None or ch.per_qubit.shape[0] == m.size else None
    if t is None:
        raise ValueError(f"mask length {m.size} does not match channel size {ch.per_qubit.shape[0]}")
    t[m] = t[m][:, [2, 1, 0]]
    return NoiseChannel(ch.p, ch.eta, t)
