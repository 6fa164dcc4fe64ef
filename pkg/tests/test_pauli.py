import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groundlearn.pauli import PauliString, PauliSum, apply_pauli, pauli_dense, pauli_sparse

from oracles import pauli_matrix

words = st.dictionaries(st.integers(0, 3), st.sampled_from("XYZ"), max_size=4)


@given(words)
@settings(max_examples=80, deadline=None)
def test_bitmask_path_matches_kron(word):
    P = PauliString.from_dict(word)
    want = pauli_matrix(word, 4)
    assert np.array_equal(pauli_sparse(P, 4).toarray(), want)
    assert np.array_equal(pauli_dense(P, 4), want)
    assert np.array_equal(PauliSum({P: 1.0}).to_dense(4), want)


@given(words, st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_apply_matches_matrix(word, seed):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    P = PauliString.from_dict(word)
    assert np.allclose(apply_pauli(P, psi, 4), pauli_matrix(word, 4) @ psi, atol=1e-14)
    V = rng.standard_normal((16, 3))
    assert np.allclose(apply_pauli(P, V, 4), pauli_matrix(word, 4) @ V, atol=1e-14)


def test_parse_and_label_round_trip():
    P = PauliString.parse("Z3 X0")
    assert P.label() == "X0 Z3"
    assert PauliString.parse(P.label()) == P
    assert PauliString.parse("I").is_identity()


def test_rejects_bad_words():
    with pytest.raises(ValueError):
        PauliString(((0, "X"), (0, "Z")))
    with pytest.raises(ValueError):
        PauliString(((0, "Q"),))


def test_sum_drops_zeros_and_merges():
    X0 = PauliString.parse("X0")
    O = PauliSum({X0: 0.5}) + PauliSum({X0: -0.5, PauliString.parse("Z1"): 2.0})
    assert len(O) == 1 and O.coefficient(PauliString.parse("Z1")) == 2.0
    assert O.scale(0.5).coefficient(PauliString.parse("Z1")) == 1.0


def test_site_outside_register():
    with pytest.raises(ValueError):
        pauli_sparse(PauliString.parse("X3"), 2)
