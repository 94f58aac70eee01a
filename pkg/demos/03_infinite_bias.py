"""Pure dephasing on the periodic X3Z3 code: symmetry lines and line decoding.

Run: python3 demos/03_infinite_bias.py
"""
from __future__ import annotations

import numpy as np

from dwcode import DomainDecoder, InfiniteBiasDecoder, NoiseChannel, make_code
from dwcode.infinite_bias import symmetry_lines
from dwcode.noise import sample_errors


def main():
    code = make_code("x3z3-periodic", L=12)
    ch = NoiseChannel(0.1, "inf")
    lines = symmetry_lines(code)
    print(f"L=12: {code.n} qubits, {len(lines)} symmetry lines of {len(lines[0])} checks each")

    rng = np.random.default_rng(7)
    x, z = sample_errors(ch, code.n, rng, 5000)
    s = code.syndromes(x, z)
    parities = np.stack([s[:, ln].sum(axis=1) % 2 for ln in lines])
    print(f"excitations per line are always even: {not parities.any()}")

    for dec in (InfiniteBiasDecoder(code, ch), DomainDecoder(code, ch)):
        cx, cz = dec.decode_batch(s)
        fail = (code.logical_classes(x ^ cx, z ^ cz) != 0).mean()
        print(f"{dec.name:>14}: p_L = {fail:.4f}, mean correction weight {cz.sum(1).mean():.1f}")


if __name__ == "__main__":
    main()
