"""Phase-free Pauli algebra and GF(2) linear algebra."""
from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwcode.pauli import (
    BinaryMatrix,
    PauliOperator,
    commutes,
    gf2_rank,
    gf2_right_inverse,
    gf2_solve,
    kernel_basis,
    multiply,
)


def paulis(n):
    bits = st.lists(st.integers(0, 1), min_size=n, max_size=n)
    return st.builds(PauliOperator, bits, bits)


def matrices(max_rows=10, max_cols=14):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.integers(0, 1), min_size=r * c, max_size=r * c).map(
                lambda b: np.array(b, np.uint8).reshape(r, c)
            )
        )
    )


def brute_rank(A):
    """Rank as log2 of the size of the row span (independent oracle)."""
    span = {bytes(A.shape[1])}
    for row in A:
        span |= {bytes(a ^ b for a, b in zip(v, row.tobytes())) for v in span}
    return int(np.log2(len(span)))


def test_multiply_examples():
    P = PauliOperator.from_label("XYZI")
    assert multiply(P, P) == PauliOperator.identity(4)
    Y = multiply(PauliOperator.from_label("X"), PauliOperator.from_label("Z"))
    assert list(Y.x) == [1] and list(Y.z) == [1]
    assert multiply(PauliOperator.from_label("XXI"), PauliOperator.from_label("IXX")) == PauliOperator.from_label("XIX")


def test_commutes_examples():
    X0, Z0 = PauliOperator.from_label("X"), PauliOperator.from_label("Z")
    assert commutes(X0, X0) == 1
    assert commutes(X0, Z0) == 0
    assert commutes(PauliOperator.from_label("XXX"), PauliOperator.from_label("ZZI")) == 1


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        multiply(PauliOperator.identity(2), PauliOperator.identity(3))
    with pytest.raises(ValueError):
        commutes(PauliOperator.identity(2), PauliOperator.identity(3))
    with pytest.raises(ValueError):
        PauliOperator([0, 1], [1])


def test_weight_and_label_roundtrip():
    P = PauliOperator.from_label("IXYZ")
    assert P.weight == 3
    assert P.label() == "IXYZ"
    assert PauliOperator.single(4, 2, "Y") == PauliOperator.from_label("IIYI")


def test_gf2_solve_examples(rng):
    assert list(gf2_solve(BinaryMatrix.identity(3), [1, 0, 1])) == [1, 0, 1]
    assert gf2_solve(np.array([[1, 1], [1, 1]]), [1, 0]) is None
    for _ in range(50):
        A = rng.integers(0, 2, (8, 12)).astype(np.uint8)
        x = rng.integers(0, 2, 12).astype(np.uint8)
        b = A @ x % 2
        sol = gf2_solve(A, b)
        assert np.array_equal(A.astype(int) @ sol % 2, b)


def test_kernel_basis_examples(rng):
    assert len(kernel_basis(BinaryMatrix.identity(4))) == 0
    assert len(kernel_basis(np.zeros((3, 5), np.uint8))) == 5
    for _ in range(20):
        A = rng.integers(0, 2, (10, 20)).astype(np.uint8)
        K = kernel_basis(A)
        assert len(K) == 20 - brute_rank(A)
        assert not (A.astype(int) @ K.T.astype(int) % 2).any()


def test_rank_matches_span_oracle(rng):
    for _ in range(30):
        A = rng.integers(0, 2, (6, 9)).astype(np.uint8)
        assert gf2_rank(A) == brute_rank(A) == BinaryMatrix(A).rank


def test_right_inverse(rng):
    A = rng.integers(0, 2, (6, 10)).astype(np.uint8)
    P, _ = gf2_right_inverse(A)
    r = gf2_rank(A)
    # every b in the column space is reproduced
    for bits in itertools.product((0, 1), repeat=3):
        x = np.zeros(10, np.uint8)
        x[:3] = bits
        b = A.astype(int) @ x % 2
        assert np.array_equal(A.astype(int) @ (P.astype(int) @ b % 2) % 2, b)
    assert r <= 6


@given(paulis(6), paulis(6), paulis(6))
def test_multiply_group_laws(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b) == multiply(b, a)
    assert multiply(a, a) == PauliOperator.identity(6)
    assert 0 <= a.weight <= a.n


@given(paulis(7), paulis(7))
def test_commutes_symmetric(a, b):
    assert commutes(a, b) == commutes(b, a)


@given(matrices(), st.data())
def test_solve_roundtrip(A, data):
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=A.shape[1], max_size=A.shape[1])), np.uint8)
    b = A.astype(int) @ x % 2
    sol = gf2_solve(A, b)
    assert sol is not None
    assert np.array_equal(A.astype(int) @ sol % 2, b)


@given(matrices())
def test_kernel_independent_and_sized(A):
    K = kernel_basis(A)
    assert len(K) == A.shape[1] - gf2_rank(A)
    if len(K):
        assert gf2_rank(K) == len(K)
        assert not (A.astype(int) @ K.T.astype(int) % 2).any()
    assert gf2_rank(A) <= min(A.shape)
