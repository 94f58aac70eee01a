"""Error enumeration helpers shared by the decoder tests."""
from __future__ import annotations

import itertools

import numpy as np


def low_weight_errors(n: int, max_weight: int, kinds: str = "XYZ"):
    """All Paulis of weight 1..max_weight as ``(x, z)`` arrays of shape (N, n)."""
    xs, zs = [], []
    for w in range(1, max_weight + 1):
        for sup in itertools.combinations(range(n), w):
            for ks in itertools.product(kinds, repeat=w):
                x = np.zeros(n, np.uint8)
                z = np.zeros(n, np.uint8)
                for q, t in zip(sup, ks):
                    x[q] = t in "XY"
                    z[q] = t in "ZY"
                xs.append(x)
                zs.append(z)
    return np.array(xs), np.array(zs)


def decode_failures(code, decoder, x, z):
    """Number of errors the decoder miscorrects; asserts syndrome consistency."""
    s = code.syndromes(x, z)
    cx, cz = decoder.decode_batch(s)
    assert np.array_equal(code.syndromes(cx, cz), s)
    return int(np.count_nonzero(code.logical_classes(x ^ cx, z ^ cz)))
