"""Random Pauli measurements and the classical-shadow estimator.

Run: python demos/03_classical_shadows.py
"""
from groundlearn.geometry import Lattice
from groundlearn.hamiltonian import build_heisenberg, correlation_observable, expectation, ground_state, sample_instance
from groundlearn.shadows import estimate_observable, sample_shadow

H = build_heisenberg(Lattice((2, 3)))
gs = ground_state(H, sample_instance(H, 7))
i, j = H.lattice.edges()[2]
C = correlation_observable(i, j)
exact = expectation(gs, C)

# One shadow of 4000 snapshots; nested prefixes give the smaller budgets.
shadow = sample_shadow(gs, 4000, seed=11)
print(f"exact C_{i}{j} = {exact:+.4f}")
for T in (50, 250, 1000, 4000):
    est = estimate_observable(shadow.head(T), C)
    print(f"T = {T:5d}: estimate {est:+.4f}, error {abs(est - exact):.4f}")
print("median of means over 10 batches:", round(estimate_observable(shadow, C, median_of_means=10), 4))
