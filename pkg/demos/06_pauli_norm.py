"""Constructive check that sum |alpha_Q| is bounded by the spectral norm for local observables.

Run: python demos/06_pauli_norm.py
"""
import numpy as np

from groundlearn.geometry import GeoRange, Lattice
from groundlearn.paulinorm import pauli_decompose, random_local_terms, verify_inequality

lat, rng = Lattice((2, 3)), GeoRange((2, 2))
gen = np.random.default_rng(5)
for trial in range(5):
    O = pauli_decompose(random_local_terms(lat, rng, gen, n_terms=4))
    r = verify_inequality(O, lat, rng)
    print(f"trial {trial}: sum|alpha| = {r.sum_abs_alpha:6.3f}, ||O|| = {r.spectral_norm:6.3f}, "
          f"Tr(O rho) = {r.trace_analytic:6.3f} (dense {r.trace_dense:6.3f}), "
          f"constant {r.bound_constant:.0f}, {'pass' if r.passed else 'FAIL'}")
