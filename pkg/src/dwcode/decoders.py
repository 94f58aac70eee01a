"""Shared decoder plumbing.

Every decoder exposes ``decode_batch(syndromes) -> (x, z)`` returning
corrections as ``(shots, n)`` bit arrays, and ``decode(s) -> DecodeResult``.
Matching decoders work in the CSS frame: a deformed code is the CSS code
conjugated by Hadamards on the mask, so the error is mapped through the
mask, decoded as X and Z sectors separately and mapped back.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .code import StabilizerCode
from .exact import DecodeResult, Syndrome
from .noise import NoiseChannel
from .pauli import PauliOperator

__all__ = [
    "Decoder",
    "SyndromeMismatchError",
    "Q_MIN",
    "Q_MAX",
    "log_odds_weight",
    "css_frame_marginals",
    "to_css_frame",
    "from_css_frame",
]

Q_MIN = 1e-300
Q_MAX = 1.0 - 1e-16


class SyndromeMismatchError(AssertionError):
    """A decoder returned a correction whose syndrome differs from the input."""


def log_odds_weight(q: ArrayLike) -> NDArray[np.float64]:
    """Edge weight ``-log(q / (1 - q))`` with ``q`` clamped to ``[1e-300, 1 - 1e-16]``.

    Weights are floored at 0 (``q > 1/2`` is treated as ``q = 1/2``) so
    matching graphs stay non-negative.
    """
    q = np.clip(np.asarray(q, dtype=np.float64), Q_MIN, Q_MAX)
    w = -np.log(q) + np.log1p(-q)
    return np.maximum(w, 0.0)


def css_frame_marginals(code: StabilizerCode, ch: NoiseChannel) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-qubit probabilities of an X and of a Z component after undoing the mask."""
    qx, qz = ch.marginals(code.n)
    m = code.mask.astype(bool)
    qx2, qz2 = qx.copy(), qz.copy()
    qx2[m], qz2[m] = qz[m], qx[m]
    return qx2, qz2


def to_css_frame(code: StabilizerCode, x: NDArray[np.uint8], z: NDArray[np.uint8]):
    m = code.mask.astype(bool)
    x2, z2 = x.copy(), z.copy()
    x2[..., m], z2[..., m] = z[..., m], x[..., m]
    return x2, z2


from_css_frame = to_css_frame


class Decoder:
    """Base class: subclasses implement :meth:`decode_batch`."""

    name = "decoder"
    check_syndrome = True

    def __init__(self, code: StabilizerCode) -> None:
        self.code = code

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        raise NotImplementedError

    def decode(self, s) -> DecodeResult:
        bits = s.bits if isinstance(s, Syndrome) else np.asarray(s, dtype=np.uint8).ravel()
        x, z = self.decode_batch(bits[None, :])
        corr = PauliOperator(x[0], z[0])
        if not np.array_equal(self.code.syndromes(x, z)[0], bits):
            raise SyndromeMismatchError(f"{self.name}: correction syndrome differs from input")
        cls = int(self.code.logical_classes(x, z)[0])
        return DecodeResult(corr, cls)
