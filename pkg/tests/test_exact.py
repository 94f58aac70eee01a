"""Exact maximum-likelihood decoding and exact logical failure rates."""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from dwcode.code import BudgetError, make_code
from dwcode.exact import (
    MLDecoder,
    Syndrome,
    coset_table,
    coset_table_enumerated,
    exact_logical_rate,
    ml_decode,
    syndrome_of,
)
from dwcode.noise import NoiseChannel, effective_permuted_channel
from dwcode.pauli import PauliOperator


def all_paulis(n, maxw):
    for w in range(1, maxw + 1):
        for sup in itertools.combinations(range(n), w):
            for kinds in itertools.product("XYZ", repeat=w):
                x = np.zeros(n, np.uint8)
                z = np.zeros(n, np.uint8)
                for q, t in zip(sup, kinds):
                    x[q] = t in "XY"
                    z[q] = t in "ZY"
                yield PauliOperator(x, z)


def test_syndrome_examples(css5):
    assert syndrome_of(css5, PauliOperator.identity(css5.n)).weight == 0
    for g in css5.generators:
        assert syndrome_of(css5, g).weight == 0
    bulk = [q for q, fs in enumerate(css5.lattice.qubit_faces()) if len(fs) == 3]
    for q in bulk:
        s = syndrome_of(css5, PauliOperator.single(css5.n, q, "Z")).bits
        assert s.sum() == 3
        assert (css5.gen_type[s == 1] == 0).all()
    with pytest.raises(ValueError):
        syndrome_of(css5, PauliOperator.identity(3))


def test_zero_syndrome_identity_class(css3):
    res = ml_decode(css3, NoiseChannel(0.05, 0.5), np.zeros(css3.m, np.uint8))
    assert res.logical_class == 0 and res.correction.weight == 0


def test_d3_corrects_all_single_qubit_errors(css3):
    ch = NoiseChannel(0.1, 0.5)
    errs = list(all_paulis(css3.n, 1))
    assert len(errs) == 21
    for E in errs:
        res = ml_decode(css3, ch, syndrome_of(css3, E))
        R = E * res.correction
        assert syndrome_of(css3, R).weight == 0
        assert css3.logical_classes(R.x, R.z)[0] == 0


@pytest.mark.parametrize("eta", [0.5, 3, "inf"])
def test_class_probabilities_total_one(css3, eta):
    ch = NoiseChannel(0.2, eta)
    total = 0.0
    for bits in itertools.product((0, 1), repeat=css3.m):
        s = np.array(bits, np.uint8)
        try:
            res = ml_decode(css3, ch, s)
        except Exception:
            continue
        total += res.class_probabilities.sum()
    assert total == pytest.approx(1.0, abs=1e-12)


def test_fourier_and_enumerated_tables_agree(x3z3_3):
    for ch in (NoiseChannel(0.15, 3), NoiseChannel(0.3, "inf")):
        a = coset_table(x3z3_3, ch)
        b = coset_table_enumerated(x3z3_3, ch)
        assert np.allclose(a, b, atol=1e-13)
        assert b.sum() == pytest.approx(1.0, abs=1e-12)


def test_ml_optimal_over_every_syndrome(css3):
    """On every syndrome the chosen class carries the largest coset mass (d=3, exhaustive)."""
    ch = NoiseChannel(0.12, 3)
    table = coset_table_enumerated(css3, ch)
    dec = MLDecoder(css3, ch)
    seen = set()
    for E in all_paulis(css3.n, css3.n):
        s = syndrome_of(css3, E).bits
        key = s.tobytes()
        if key in seen:
            continue
        seen.add(key)
        res = dec.decode(s)
        row = table[int(dec.qt.syndrome_index(s[None])[0])]
        assert row[res.logical_class] >= row.max() - 1e-15
    assert len(seen) == 2 ** (css3.n - css3.k)
    assert 1.0 - table.max(1).sum() == pytest.approx(exact_logical_rate(css3, ch), abs=1e-14)


def test_decoder_matches_single_shot(css3):
    ch = NoiseChannel(0.1, 0.5)
    dec = MLDecoder(css3, ch)
    for E in list(all_paulis(css3.n, 2))[:200]:
        s = syndrome_of(css3, E)
        a = dec.decode(s)
        b = ml_decode(css3, ch, s)
        assert a.logical_class == b.logical_class
        assert np.array_equal(css3.syndromes(a.correction.x, a.correction.z)[0], s.bits)


def test_exact_rate_examples(css3):
    assert exact_logical_rate(css3, NoiseChannel(0.0, 0.5)) == 0.0
    assert exact_logical_rate(css3, NoiseChannel(0.5, "inf")) == pytest.approx(0.5, abs=1e-12)


def test_exact_rate_matches_direct_error_sum(css3):
    """Independent route: sum Pr(E) over every error the decoder gets wrong."""
    ch = NoiseChannel(0.1, 3)
    dec = MLDecoder(css3, ch)
    t = ch.outcome_table(css3.n)
    fail = 0.0
    for outs in itertools.product(range(4), repeat=css3.n):
        o = np.array(outs)
        x, z = (o & 1).astype(np.uint8), (o >> 1).astype(np.uint8)
        s = css3.syndromes(x, z)
        cx, cz = dec.decode_batch(s)
        if css3.logical_classes(x ^ cx[0], z ^ cz[0])[0] != 0:
            fail += float(np.prod(t[np.arange(css3.n), o]))
    assert fail == pytest.approx(exact_logical_rate(css3, ch), abs=1e-14)


@pytest.mark.parametrize("eta", [0.5, 3, 100, math.inf])
@pytest.mark.parametrize("p", [0.05, 0.15, 0.3])
def test_permutation_equivalence(css3, x3z3_3, eta, p):
    ch = NoiseChannel(p, eta)
    a = exact_logical_rate(x3z3_3, ch)
    b = exact_logical_rate(css3, effective_permuted_channel(ch, x3z3_3.mask))
    assert abs(a - b) < 1e-12


def test_budget_errors():
    code = make_code("css", d=7)
    with pytest.raises(BudgetError):
        ml_decode(code, NoiseChannel(0.1, 0.5), np.zeros(code.m, np.uint8))
    with pytest.raises(BudgetError):
        exact_logical_rate(make_code("css", d=5), NoiseChannel(0.1, 0.5))


def test_syndrome_type_equality():
    assert Syndrome([1, 0, 1]) == Syndrome(np.array([1, 0, 1]))
    assert Syndrome([1, 0, 1]).weight == 2
