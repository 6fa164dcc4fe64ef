import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groundlearn.geometry import (GeoRange, Lattice, enumerate_geo_paulis, is_geo_local, obs_distance,
                                  qubit_distance, support_extent)
from groundlearn.pauli import PauliString

from oracles import brute_force_local_words


def test_qubit_distance_examples():
    sq = Lattice((3, 3))
    assert qubit_distance(sq, sq.index((0, 0)), sq.index((2, 1))) == 3
    assert qubit_distance(sq, 4, 4) == 0
    assert qubit_distance(Lattice((5,)), 0, 4) == 4


def test_obs_distance_examples():
    chain = Lattice((4,))
    assert obs_distance(chain, PauliString.parse("X0"), PauliString.parse("Z3")) == 3
    assert obs_distance(chain, (1, 2), PauliString.parse("Y2 Z3")) == 0
    sq = Lattice((3, 2))
    a = [sq.index((0, 0)), sq.index((0, 1))]
    assert obs_distance(sq, a, [sq.index((2, 0))]) == 2


def test_obs_distance_matches_pairwise_min():
    lat = Lattice((3, 3))
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.choice(lat.n, size=rng.integers(1, 4), replace=False)
        b = rng.choice(lat.n, size=rng.integers(1, 4), replace=False)
        ca, cb = lat.all_coords()[a], lat.all_coords()[b]
        want = np.abs(ca[:, None, :] - cb[None, :, :]).sum(axis=2).min()
        assert obs_distance(lat, a.tolist(), b.tolist()) == want


def test_empty_support_rejected():
    with pytest.raises(ValueError):
        obs_distance(Lattice((3,)), PauliString(), [0])


@given(st.lists(st.integers(1, 4), min_size=1, max_size=2), st.data())
@settings(max_examples=60, deadline=None)
def test_distance_is_a_metric(sides, data):
    lat = Lattice(tuple(sides))
    i, j, k = (data.draw(st.integers(0, lat.n - 1)) for _ in range(3))
    d = lambda a, b: qubit_distance(lat, a, b)  # noqa: E731
    assert d(i, j) == d(j, i) >= 0
    assert (d(i, j) == 0) == (i == j)
    assert d(i, k) <= d(i, j) + d(j, k)


def test_edges_and_diameter():
    assert len(Lattice((2, 2)).edges()) == 4
    assert len(Lattice((4, 5)).edges()) == 31
    assert Lattice((2, 3)).diameter() == 3


@pytest.mark.parametrize("sides,r,expected", [((1,), 2, 3), ((2,), 2, 15), ((3,), 1, 27)])
def test_enumeration_counts(sides, r, expected):
    out = enumerate_geo_paulis(Lattice(sides), GeoRange((r,)))
    assert len(out) == expected == len(set(out))


@pytest.mark.parametrize("sides,ranges", [((4,), (1,)), ((5,), (2,)), ((2, 3), (1, 1)), ((3, 3), (1, 2))])
def test_enumeration_matches_brute_force(sides, ranges):
    lat = Lattice(sides)
    got = {P.support for P in enumerate_geo_paulis(lat, GeoRange(ranges))}
    want = brute_force_local_words(sides, ranges, max_sites=lat.n)
    assert got == want


def test_enumeration_is_canonically_ordered():
    out = enumerate_geo_paulis(Lattice((4,)), GeoRange((2,)))
    assert out == enumerate_geo_paulis(Lattice((4,)), GeoRange((2,)))
    assert all(not P.is_identity() for P in out)


def test_geo_local_predicate():
    lat = Lattice((3, 3))
    rng = GeoRange((1, 2))
    assert support_extent(lat, [0, 2]) == (0, 2)
    assert is_geo_local(lat, rng, [0, 2])
    assert not is_geo_local(lat, rng, [0, 6])


def test_invalid_shapes():
    with pytest.raises(ValueError):
        Lattice((0, 2))
    with pytest.raises(ValueError):
        GeoRange((0,))
    with pytest.raises(ValueError):
        Lattice((2, 2)).coords(4)


def test_row_major_coordinates():
    lat = Lattice((2, 3))
    assert [lat.coords(i) for i in range(6)] == list(itertools.product(range(2), range(3)))
