"""Matching decoder for rotated surface codes (CSS and XZZX).

The XZZX code is the CSS surface code conjugated by Hadamards on a mask,
so it is decoded in the CSS frame: X-type checks locate Z errors and Z-type
checks locate X errors, each by matching with bias-aware weights.
"""
from __future__ import annotations

import numpy as np
import pymatching
from numpy.typing import ArrayLike, NDArray

from .code import StabilizerCode
from .decoders import Decoder, css_frame_marginals, log_odds_weight, to_css_frame
from .lattice import LatticeKind
from .noise import NoiseChannel

__all__ = ["SurfaceMatchingDecoder", "surface_matching_decode"]


class SurfaceMatchingDecoder(Decoder):
    """Two-sector matching decoder for square-lattice surface codes.

    Parameters
    ----------
    code : StabilizerCode
        Rotated surface code, CSS or with an XZZX mask.
    ch : NoiseChannel
    """

    name = "surface-matching"

    def __init__(self, code: StabilizerCode, ch: NoiseChannel) -> None:
        super().__init__(code)
        if code.lattice.kind != LatticeKind.SQUARE_SURFACE:
            raise ValueError("surface matching decoder needs a square surface-code lattice")
        gx, gz = to_css_frame(code, code.gx, code.gz)
        xrows = np.flatnonzero(~gz.any(axis=1))
        zrows = np.flatnonzero(~gx.any(axis=1))
        if len(xrows) + len(zrows) != code.m:
            raise ValueError("code is not CSS in the frame given by its mask")
        qx, qz = css_frame_marginals(code, ch)
        self.xrows, self.zrows = xrows, zrows
        # Z errors flip X-type checks, X errors flip Z-type checks
        self.mz = pymatching.Matching.from_check_matrix(gx[xrows], weights=log_odds_weight(qz))
        self.mx = pymatching.Matching.from_check_matrix(gz[zrows], weights=log_odds_weight(qx))

    def decode_batch(self, syndromes: ArrayLike) -> tuple[NDArray[np.uint8], NDArray[np.uint8]]:
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        z = self.mz.decode_batch(s[:, self.xrows]).astype(np.uint8)
        x = self.mx.decode_batch(s[:, self.zrows]).astype(np.uint8)
        return to_css_frame(self.code, x, z)


def surface_matching_decode(code: StabilizerCode, ch: NoiseChannel, s):
    """Decode one syndrome with :class:`SurfaceMatchingDecoder`."""
    return SurfaceMatchingDecoder(code, ch).decode(s)
