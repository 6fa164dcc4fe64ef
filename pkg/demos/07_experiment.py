"""End to end: data, cross-validated training, a shadow-size sweep, importance and locality.

This is the library view of what the ``groundlearn`` CLI does. It takes
about a minute.

Run: python demos/07_experiment.py
"""
import numpy as np

from groundlearn.geometry import Lattice
from groundlearn.hamiltonian import build_heisenberg, sample_instance
from groundlearn.harness.analysis import coupling_importance, locality_probe, near_far
from groundlearn.harness.config import ExperimentConfig
from groundlearn.harness.data import gen_dataset
from groundlearn.harness.experiment import evaluate_point, run_experiment
from groundlearn.pauli import PauliString

cfg = ExperimentConfig.from_dict({
    "lattice": {"sides": [2, 3]}, "M": 40, "N": 20, "T": 400, "seed": 1,
    "feature_map": {"kind": "rff", "R_feat": [10], "gamma": [0.5, 0.6]},
    "sweep": {"kind": "T", "values": [25, 100, 400]},
})

# Test RMSE (against exact labels) falls as shadows get larger.
for r in run_experiment(cfg):
    if r.observable == "all":
        print(f"T = {r.value:4}: test RMSE {r.rmse:.4f} over {r.n_test} held-out instances")

# Which couplings does a model trained on exact labels rely on? With M = 40 the
# picture is noisy; the acceptance suite averages over five seeds at M = 60.
exact = ExperimentConfig.from_dict({**cfg.to_dict(), "labels": "exact", "sweep": None})
data = gen_dataset(exact)
res = evaluate_point(exact, data, "none", None, exact.N, None)
for tr, pair in zip(res.trained, data.edges):
    near, far = near_far(data.H, coupling_importance(tr.model, tr.feature_map), pair, tr.model.hyper["delta1"])
    print(f"C{pair}: mean importance of nearby couplings {near:.3f}, of distant ones {far:.3f}")

# Resetting couplings outside I_P to J = 1 perturbs the ground state less as I_P
# grows. The error vanishes once I_P covers the chain, though not always monotonically.
H = build_heisenberg(Lattice((10,)))
J = sample_instance(H, 3)
for row in locality_probe(H, PauliString.parse("Z4 Z5"), J, range(5)):
    print(f"delta1 = {row.delta1:.0f}: |I_P| = {row.ip_size}, error {row.err:.2e}")
