import numpy as np
import pytest

from groundlearn.geometry import Lattice
from groundlearn.hamiltonian import GroundStateResult, build_heisenberg, correlation_observable, ground_state
from groundlearn.pauli import PauliString, PauliSum
from groundlearn.shadows import (ShadowSet, estimate_observable, estimate_pauli, read_shadow_binary,
                                 read_shadow_csv, sample_shadow, write_shadow_binary, write_shadow_csv)

from oracles import pauli_matrix, random_state


def pure(psi, n):
    return GroundStateResult(0.0, np.asarray(psi, dtype=complex).reshape(-1, 1), 1.0, False, n)


def zero_state(n):
    v = np.zeros(1 << n)
    v[0] = 1
    return pure(v, n)


def test_z_basis_on_zero_state_is_deterministic():
    sh = sample_shadow(zero_state(3), 2000, seed=1)
    z = sh.bases == 2
    assert np.all(sh.outcomes[z] == 1)


def test_x_basis_on_zero_state_is_fair():
    sh = sample_shadow(zero_state(1), 10_000, seed=2)
    x = sh.outcomes[sh.bases[:, 0] == 0, 0]
    assert abs(np.mean(x == 1) - 0.5) < 0.02


def test_seeded_sampling_is_reproducible():
    gs = ground_state(build_heisenberg(Lattice((3,))), [0.7, 1.4])
    assert sample_shadow(gs, 300, 5) == sample_shadow(gs, 300, 5)
    assert sample_shadow(gs, 300, 5) != sample_shadow(gs, 300, 6)


def test_single_snapshot_values():
    Z0 = PauliString.parse("Z0")
    match = ShadowSet(np.array([[2]]), np.array([[1]]), 1)
    miss = ShadowSet(np.array([[0]]), np.array([[1]]), 1)
    assert estimate_pauli(match, Z0) == 3.0
    assert estimate_pauli(miss, Z0) == 0.0


def test_zero_state_z_estimate():
    sh = sample_shadow(zero_state(1), 100_000, seed=3)
    assert abs(estimate_pauli(sh, PauliString.parse("Z0")) - 1.0) < 0.02


def test_singlet_correlation_estimate():
    gs = ground_state(build_heisenberg(Lattice((2,))), [1.0])
    sh = sample_shadow(gs, 100_000, seed=4)
    assert estimate_observable(sh, correlation_observable(0, 1)) == pytest.approx(-1.0, abs=0.03)


def test_estimator_is_linear_and_empty_sum_is_zero():
    gs = ground_state(build_heisenberg(Lattice((3,))), [1.2, 0.3])
    sh = sample_shadow(gs, 500, 7)
    O = correlation_observable(1, 2) + PauliSum({PauliString.parse("X0"): 0.4})
    assert estimate_observable(sh, O.scale(-2.5)) == -2.5 * estimate_observable(sh, O)
    assert estimate_observable(sh, PauliSum()) == 0.0


def test_unbiased_on_random_state():
    rng = np.random.default_rng(8)
    psi = random_state(3, rng)
    sh = sample_shadow(pure(psi, 3), 40_000, seed=9)
    for word in ({0: "X"}, {1: "Y", 2: "Z"}, {0: "Z", 2: "Z"}):
        exact = np.real(psi.conj() @ pauli_matrix(word, 3) @ psi)
        est = estimate_pauli(sh, PauliString.from_dict(word))
        assert abs(est - exact) < 5 * 3 ** len(word) / np.sqrt(sh.T)


def test_median_of_means_runs_and_is_close():
    gs = ground_state(build_heisenberg(Lattice((2,))), [1.0])
    sh = sample_shadow(gs, 20_000, 10)
    P = PauliString.parse("Z0 Z1")
    assert estimate_pauli(sh, P, median_of_means=10) == pytest.approx(-1.0, abs=0.1)


def test_head_is_a_prefix():
    gs = zero_state(2)
    sh = sample_shadow(gs, 50, 11)
    assert sh.head(20) == ShadowSet(sh.bases[:20], sh.outcomes[:20], 2)
    with pytest.raises(ValueError):
        sh.head(51)


def test_binary_and_csv_round_trip(tmp_path):
    gs = ground_state(build_heisenberg(Lattice((2, 2))), [0.5, 1.5, 1.0, 0.2])
    sh = sample_shadow(gs, 77, 12)
    write_shadow_binary(sh, tmp_path / "s.glsh")
    assert read_shadow_binary(tmp_path / "s.glsh") == sh
    write_shadow_csv(sh, tmp_path / "s.csv")
    assert read_shadow_csv(tmp_path / "s.csv", 4) == sh


def test_estimator_guards():
    sh = sample_shadow(zero_state(2), 10, 0)
    with pytest.raises(ValueError):
        estimate_pauli(sh, PauliString())
    with pytest.raises(ValueError):
        estimate_pauli(sh, PauliString.parse("X5"))
