"""The two feature maps: exact-cell indicators and random Fourier features.

Run: python demos/04_feature_maps.py
"""
import numpy as np

from groundlearn.features import IndicatorFeatureMap, RffMap, compute_IP, phi_indicator, rescale
from groundlearn.geometry import Lattice
from groundlearn.hamiltonian import build_heisenberg, sample_instance
from groundlearn.pauli import PauliString

H = build_heisenberg(Lattice((6,)))
P = PauliString.parse("Z2 Z3")
for d1 in (0, 1, 2):
    print(f"delta1 = {d1}: I_P holds couplings {compute_IP(H, H.lattice, P, d1).coords}")

# Indicator map: one block per Pauli string, exactly one active cell per block.
fm = IndicatorFeatureMap.build(H, delta1=0, delta2=0.5)
x = rescale(sample_instance(H, 0))  # couplings in [0, 2] -> [-1, 1]
phi = phi_indicator(fm, x)
print(f"indicator map: {fm.n_paulis} strings, {fm.m_phi} features, {phi.nnz} active for this instance")

# RFF map: cos/sin features per coupling neighbourhood.
rff = RffMap.build(H, delta1=0, n_features=5, gamma=0.6, seed=1)
z = rff.transform(x[None, :])[0]
print(f"RFF map: {len(rff.regions)} regions, {rff.dim} features, |phi| = {np.linalg.norm(z):.3f}")
