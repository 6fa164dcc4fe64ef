import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groundlearn.errors import CapacityError
from groundlearn.geometry import GeoRange, Lattice, enumerate_geo_paulis, obs_distance
from groundlearn.hamiltonian import build_heisenberg
from groundlearn.features import (IndicatorFeatureMap, RffMap, build_XP, cell_of, compute_IP, indicator_design,
                                  load_feature_map, phi_indicator, phi_rff, rescale, restrict_chi, save_feature_map,
                                  theory_delta1, theory_delta2, unrescale)
from groundlearn.pauli import PauliString


@pytest.fixture(scope="module")
def H23():
    return build_heisenberg(Lattice((2, 3)))


def test_IP_at_zero_distance(H23):
    lat = H23.lattice
    for c, (i, j) in enumerate(lat.edges()):
        P = PauliString(((i, "Z"), (j, "Z")))
        want = tuple(k for k, e in enumerate(lat.edges()) if set(e) & {i, j})
        assert compute_IP(H23, lat, P, 0).coords == want


def test_IP_everything_and_monotone(H23):
    P = PauliString.parse("X0")
    assert compute_IP(H23, H23.lattice, P, H23.lattice.diameter()).coords == tuple(range(H23.m))
    sizes = [len(compute_IP(H23, H23.lattice, P, d)) for d in range(5)]
    assert sizes == sorted(sizes)


def test_IP_matches_distance_scan(H23):
    for P in enumerate_geo_paulis(H23.lattice, GeoRange((1, 1)))[:30]:
        for d in (0, 1, 2):
            want = tuple(c for c in range(H23.m) if obs_distance(H23.lattice, H23.term_of(c).support, P) <= d)
            assert compute_IP(H23, H23.lattice, P, d).coords == want


def test_restrict_chi():
    x = np.array([0.3, -0.2, 0.9])
    assert np.array_equal(restrict_chi(x, [0, 1, 2]), x)
    assert np.array_equal(restrict_chi(x, []), np.zeros(3))
    once = restrict_chi(x, [2])
    assert np.array_equal(restrict_chi(once, [2]), once)


def test_grid_sizes_and_values():
    g = build_XP([0], 0.5)
    assert g.size == 5
    assert sorted(g.decode(k, 1)[0] for k in range(5)) == [-1, -0.5, 0, 0.5, 1]
    assert build_XP([0, 3], 0.5).size == 25
    for k, d2 in itertools.product(range(1, 4), (1, 0.5, 0.25)):
        vals = np.arange(-1, 1 + 1e-12, d2)
        brute = set(itertools.product(vals.round(12), repeat=k))
        g = build_XP(range(k), d2)
        assert g.size == len(brute) == (2 / d2 + 1) ** k
        assert {tuple(g.decode(i, k).round(12)) for i in range(g.size)} == brute


def test_cell_examples():
    assert cell_of(np.array([0.6]), [0], 0.5)[0] == 0.5
    assert cell_of(np.array([0.75]), [0], 0.5)[0] == 1.0
    assert cell_of(np.array([0.0]), [0], 0.5)[0] == 0.0
    g = build_XP([0], 0.5)
    assert g.contains(g.encode(np.array([1.0])), np.array([0.75]))
    assert not g.contains(g.encode(np.array([0.5])), np.array([0.75]))


def test_bad_delta2_and_capacity():
    with pytest.raises(ValueError):
        build_XP([0], 0.3)
    with pytest.raises(CapacityError):
        build_XP(range(40), 0.5)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.sampled_from([1.0, 0.5, 0.25]))
@settings(max_examples=200, deadline=None)
def test_exactly_one_cell_contains_x(x, d2):
    x = np.array(x)
    g = build_XP([0, 1, 2], d2)
    hits = [k for k in range(g.size) if g.contains(k, x)]
    assert hits == [g.cell_of(x)]


def test_indicator_map_structure(H23):
    fm = IndicatorFeatureMap.build(H23, 0, 1.0, rng=GeoRange((1, 1)))
    n_geo = len(enumerate_geo_paulis(H23.lattice, GeoRange((1, 1))))
    assert fm.n_paulis == n_geo
    assert fm.m_phi == sum((2 / 1.0 + 1) ** len(e.ip) for e in fm.entries)
    x = np.random.default_rng(0).uniform(-1, 1, H23.m)
    phi = phi_indicator(fm, x)
    assert phi.nnz == n_geo and set(phi.data) == {1.0}
    assert phi.multiply(phi).sum() == n_geo
    X = np.random.default_rng(1).uniform(-1, 1, (7, H23.m))
    assert np.array_equal(indicator_design(fm, X).toarray()[3], phi_indicator(fm, X[3]).toarray()[0])


def test_indicator_ignores_coordinates_outside_IP():
    H = build_heisenberg(Lattice((6,)))
    P = PauliString.parse("Z0")
    fm = IndicatorFeatureMap.build(H, 0, 0.5, paulis=[P])
    x = np.zeros(H.m)
    y = x.copy()
    y[4] = 0.9  # edge (4,5) is far from site 0
    assert np.array_equal(fm.active_columns(x), fm.active_columns(y))


def test_two_site_toy_family():
    H = build_heisenberg(Lattice((2,)))
    fm = IndicatorFeatureMap.build(H, 0, 0.5)
    assert fm.n_paulis == 15
    phi = phi_indicator(fm, np.array([0.3]))
    assert phi.multiply(phi).sum() == 15


def test_rff_basics(H23):
    rff = RffMap.build(H23, 0, 5, 0.6, seed=3)
    assert rff.dim == 2 * 5 * H23.m
    z = phi_rff(rff, np.zeros(H23.m))
    assert np.all(z[0::2] == 1) and np.all(z[1::2] == 0)
    x = np.random.default_rng(2).uniform(-1, 1, H23.m)
    a, b = phi_rff(rff, x), phi_rff(RffMap.build(H23, 0, 5, 0.6, seed=3), x)
    assert np.array_equal(a, b) and np.all(np.abs(a) <= 1)


def test_rff_prefix_property(H23):
    small, big = RffMap.build(H23, 0, 5, 0.5, 1), RffMap.build(H23, 0, 20, 0.5, 1)
    for a, b in zip(small.omegas, big.omegas):
        assert np.array_equal(a, b[:5])


def test_rff_matches_direct_formula(H23):
    rff = RffMap.build(H23, 1, 3, 0.7, 4)
    x = np.random.default_rng(5).uniform(-1, 1, H23.m)
    z = phi_rff(rff, x)
    k = 0
    for coords, om in zip(rff.regions, rff.omegas):
        for w in om:
            arg = 0.7 / np.sqrt(len(coords)) * w @ x[list(coords)]
            assert z[k] == pytest.approx(np.cos(arg)) and z[k + 1] == pytest.approx(np.sin(arg))
            k += 2


def test_feature_map_round_trip(tmp_path, H23):
    for fm in (RffMap.build(H23, 0, 4, 0.5, 2), IndicatorFeatureMap.build(H23, 0, 0.5, rng=GeoRange((1, 1)))):
        save_feature_map(fm, tmp_path / "fm.json")
        back = load_feature_map(tmp_path / "fm.json")
        assert back.fingerprint() == fm.fingerprint()
        assert json.loads((tmp_path / "fm.json").read_text())["kind"] in ("rff", "indicator")


def test_rescale_and_theory_knobs():
    assert np.array_equal(rescale([0, 1, 2]), [-1, 0, 1])
    assert np.allclose(unrescale(rescale([0.2, 1.7])), [0.2, 1.7], rtol=0, atol=1e-15)
    assert theory_delta1(0.1, 1.0) == pytest.approx(np.log(10) ** 2)
    assert 1 / theory_delta2(0.1, 1.0, 4) == 20
