"""The random antiferromagnetic Heisenberg model and its exact ground states.

Run: python demos/02_ground_states.py
"""
import numpy as np

from groundlearn.geometry import Lattice
from groundlearn.hamiltonian import build_heisenberg, correlation_observable, expectation, ground_state, sample_instance

H = build_heisenberg(Lattice((2, 3)))
print(f"{H.n} qubits, {H.m} couplings J_ij drawn uniformly from [0, 2]")

for seed in range(3):
    J = sample_instance(H, seed)
    gs = ground_state(H, J)
    # C_ij = (X_i X_j + Y_i Y_j + Z_i Z_j) / 3 on every coupled pair
    C = [expectation(gs, correlation_observable(i, j)) for i, j in H.lattice.edges()]
    print(f"seed {seed}: E0 = {gs.energy:+.4f}, gap = {gs.gap:.4f}, "
          f"mean C_ij on edges = {np.mean(C):+.3f} (antiferromagnetic < 0)")

# A single strong bond makes its pair an almost perfect singlet (C = -1).
J = np.full(H.m, 0.05)
J[0] = 2.0
i, j = H.lattice.edges()[0]
print(f"one strong bond ({i},{j}): C = {expectation(ground_state(H, J), correlation_observable(i, j)):+.3f}")
