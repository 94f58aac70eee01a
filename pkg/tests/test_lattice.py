"""Lattice construction: counts, colourability, trivalence, serialisation."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwcode.lattice import (
    BoundaryKind,
    Color,
    Lattice,
    LatticeKind,
    build_488_triangular,
    build_hex_coprime,
    build_hex_periodic,
    build_hex_triangular,
    build_square_surface,
)


def faces_per_qubit(lat):
    return np.array([len(fs) for fs in lat.qubit_faces()])


def distinct_valid(lat):
    return all(len(set(q.tolist())) == len(q) and q.min() >= 0 and q.max() < lat.n for q in lat.face_qubits)


@pytest.mark.parametrize("d,n,f", [(3, 7, 3), (5, 19, 9), (11, 91, 45)])
def test_hex_triangular_counts(d, n, f):
    lat = build_hex_triangular(d)
    assert (lat.n, lat.num_faces) == (n, f)
    assert n == (3 * d * d + 1) // 4


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11, 13, 17, 21, 25, 31])
def test_hex_triangular_structure(d):
    lat = build_hex_triangular(d)
    assert lat.kind == LatticeKind.HEX_666
    assert lat.boundary.kind == BoundaryKind.OPEN_TRIANGULAR
    assert lat.n == (3 * d * d + 1) // 4
    assert lat.is_three_colorable()
    assert distinct_valid(lat)
    assert set(lat.face_weights().tolist()) <= {4, 6}
    fpq = faces_per_qubit(lat)
    assert fpq.max() == 3 and fpq.min() >= 1
    # one boundary per colour
    assert sorted(lat.boundary.side_colors) == [Color.RED, Color.GREEN, Color.BLUE]


@pytest.mark.parametrize("d", [1, 2, 4, 0, -3])
def test_hex_triangular_rejects(d):
    with pytest.raises(ValueError):
        build_hex_triangular(d)


@pytest.mark.parametrize("L", [6, 12, 18])
def test_hex_periodic(L):
    lat = build_hex_periodic(L)
    assert (lat.n, lat.num_faces) == (2 * L * L, L * L)
    assert lat.boundary.kind == BoundaryKind.PERIODIC
    assert lat.is_three_colorable()
    assert distinct_valid(lat)
    assert (faces_per_qubit(lat) == 3).all()
    assert (lat.face_weights() == 6).all()


@pytest.mark.parametrize("L", [4, 5, 7, 8, 0])
def test_hex_periodic_rejects(L):
    with pytest.raises(ValueError, match="multiple of 6"):
        build_hex_periodic(L)


@pytest.mark.parametrize("k", [1, 2])
def test_hex_coprime(k):
    lat = build_hex_coprime(k)
    assert lat.n == 2 * 6 * k * (12 * k - 1)
    assert lat.num_faces == 6 * k * (12 * k - 1)
    assert lat.boundary.kind == BoundaryKind.COPRIME_TWISTED
    assert lat.is_three_colorable()
    assert (faces_per_qubit(lat) == 3).all()
    assert (lat.face_weights() == 6).all()


def test_hex_coprime_k1_counts_and_rejects():
    lat = build_hex_coprime(1)
    assert (lat.n, lat.num_faces) == (132, 66)
    with pytest.raises(ValueError):
        build_hex_coprime(0)


def test_488_d3():
    # the smallest triangular 4.8.8 patch is the 7-qubit code with 3 faces
    lat = build_488_triangular(3)
    assert (lat.n, lat.num_faces) == (7, 3)
    assert lat.kind == LatticeKind.LATTICE_488
    assert lat.is_three_colorable()


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_488_structure(d):
    lat = build_488_triangular(d)
    assert lat.is_three_colorable()
    assert distinct_valid(lat)
    assert set(lat.face_weights().tolist()) <= {4, 6, 8}
    fpq = faces_per_qubit(lat)
    assert fpq.max() == 3 and fpq.min() >= 1
    # bulk qubits: every qubit that is not on the boundary touches three faces
    nvirt = lat.qubit_vertices >= lat.num_faces
    bulk = ~nvirt.any(axis=1)
    assert bulk.any() and (fpq[bulk] == 3).all()


@pytest.mark.parametrize("d", [2, 4, 1])
def test_488_rejects(d):
    with pytest.raises(ValueError):
        build_488_triangular(d)


def test_square_surface():
    lat = build_square_surface(3)
    assert (lat.n, lat.num_faces) == (9, 8)
    assert set(lat.face_weights().tolist()) == {2, 4}
    assert build_square_surface(5).n == 25
    assert all(c == Color.NONE for c in lat.face_colors)
    assert sorted(set(lat.face_roles)) == ["X", "Z"]
    assert not lat.is_three_colorable()
    with pytest.raises(ValueError):
        build_square_surface(1)


@pytest.mark.parametrize(
    "lat",
    [build_hex_triangular(5), build_hex_periodic(6), build_hex_coprime(1), build_488_triangular(5), build_square_surface(3)],
    ids=["tri5", "per6", "cop1", "488-5", "surf3"],
)
def test_json_roundtrip(lat):
    back = Lattice.from_json(lat.to_json())
    assert back.n == lat.n and back.num_faces == lat.num_faces
    assert np.array_equal(back.incidence(), lat.incidence())
    assert np.array_equal(back.face_colors, lat.face_colors)
    assert back.boundary == lat.boundary


@given(st.sampled_from([3, 5, 7, 9, 11, 13]))
def test_triangular_count_formula_property(d):
    lat = build_hex_triangular(d)
    assert lat.n == (3 * d * d + 1) // 4
    assert lat.is_three_colorable()
