"""Instances, exact labels and classical shadows for the Heisenberg family."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import CapacityError
from ..geometry import Lattice
from ..hamiltonian import MAX_QUBITS, ParamHamiltonian, build_heisenberg, correlation_observable, expectation, ground_state
from ..shadows import ShadowSet, estimate_observable, read_shadow_binary, sample_shadow, write_shadow_binary
from . import seeds
from .config import ExperimentConfig
from .io import read_csv, read_json, write_csv, write_json
from .pool import run_jobs


@dataclass
class ExperimentData:
    lattice: Lattice
    H: ParamHamiltonian
    couplings: np.ndarray  # (M, m), raw couplings in [0, 2]
    instance_seeds: np.ndarray
    shadow_seeds: np.ndarray
    exact: np.ndarray  # (M, E): C_ij on every edge
    shadows: Optional[list[ShadowSet]] = None

    @property
    def M(self) -> int:
        return len(self.couplings)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return self.lattice.edges()

    def labels(self, mode: str, T: Optional[int] = None, median_of_means: Optional[int] = None) -> np.ndarray:
        """``(M, E)`` training labels: exact values or shadow estimates from ``T`` snapshots."""
        if mode == "exact":
            return self.exact
        if self.shadows is None:
            raise ValueError("dataset was generated without shadows")
        obs = [correlation_observable(i, j) for i, j in self.edges]
        out = np.empty_like(self.exact)
        for k, sh in enumerate(self.shadows):
            part = sh if T is None else sh.head(T)
            out[k] = [estimate_observable(part, O, median_of_means) for O in obs]
        return out


def _instance_job(args):
    sides, normalized, x, shadow_seed, T = args
    lat = Lattice(tuple(sides))
    H = build_heisenberg(lat, normalized=normalized)
    gs = ground_state(H, x)
    labels = [expectation(gs, correlation_observable(i, j)) for i, j in lat.edges()]
    sh = sample_shadow(gs, T, shadow_seed) if T else None
    return np.array(labels), sh


def gen_dataset(cfg: ExperimentConfig, lattice: Optional[Lattice] = None, shadows: Optional[bool] = None) -> ExperimentData:
    """Sample ``M`` coupling vectors, label them exactly and (for shadow labels)
    draw ``T_max`` snapshots per instance."""
    lat = lattice or cfg.lattice
    if lat.n > MAX_QUBITS:
        raise CapacityError(f"{lat.n} qubits exceeds the exact-solver cap of {MAX_QUBITS}")
    if lat.dims > 2:
        raise CapacityError("the Heisenberg family is built for 1D and 2D lattices")
    H = build_heisenberg(lat, normalized=cfg.normalized)
    if shadows is None:
        shadows = cfg.labels == "shadow"
    inst = np.array([seeds.derive_seed(cfg.seed, seeds.INSTANCE, k) for k in range(cfg.M)], dtype=np.int64)
    shad = np.array([seeds.derive_seed(cfg.seed, seeds.SHADOW, k) for k in range(cfg.M)], dtype=np.int64)
    X = np.array([np.random.default_rng(int(s)).uniform(0.0, 2.0, size=H.m) for s in inst])
    T = cfg.shadow_budget() if shadows else 0
    jobs = [(lat.sides, cfg.normalized, X[k], int(shad[k]), T) for k in range(cfg.M)]
    results = run_jobs(_instance_job, jobs, cfg.workers)
    exact = np.array([r[0] for r in results])
    sh = [r[1] for r in results] if shadows else None
    return ExperimentData(lat, H, X, inst, shad, exact, sh)


def write_dataset(data: ExperimentData, root) -> None:
    root = Path(root)
    m = data.H.m
    write_csv(
        root / "instances.csv", "instances",
        ["instance_id", "seed", "shadow_seed"] + [f"x_{c}" for c in range(m)],
        ([k, int(data.instance_seeds[k]), int(data.shadow_seeds[k]), *data.couplings[k]] for k in range(data.M)),
    )
    rows = []
    for k in range(data.M):
        for e, (i, j) in enumerate(data.edges):
            rows.append([k, e, i, j, data.exact[k, e]])
    write_csv(root / "labels.csv", "labels", ["instance_id", "observable_id", "i", "j", "value"], rows)
    if data.shadows is not None:
        (root / "shadows").mkdir(parents=True, exist_ok=True)
        for k, sh in enumerate(data.shadows):
            write_shadow_binary(sh, root / "shadows" / f"instance_{k:05d}.glsh")
    manifest = {
        "lattice": data.lattice.to_config(),
        "family": data.H.metadata.get("family"),
        "normalized": data.H.metadata.get("normalized"),
        "M": data.M,
        "m": m,
        "observables": [{"id": e, "i": i, "j": j, "kind": "C_ij"} for e, (i, j) in enumerate(data.edges)],
        "shadow_T": None if data.shadows is None else int(data.shadows[0].T),
        "seed_scheme": "SeedSequence([master, purpose, k]); purposes instance=1, shadow=2",
    }
    write_json(root / "dataset.json", "dataset", manifest)


def load_dataset(root) -> ExperimentData:
    root = Path(root)
    man = read_json(root / "dataset.json")
    lat = Lattice.from_config(man["lattice"])
    H = build_heisenberg(lat, normalized=bool(man["normalized"]))
    inst = read_csv(root / "instances.csv")
    m = man["m"]
    X = np.array([[float(r[f"x_{c}"]) for c in range(m)] for r in inst])
    iseeds = np.array([int(r["seed"]) for r in inst], dtype=np.int64)
    sseeds = np.array([int(r["shadow_seed"]) for r in inst], dtype=np.int64)
    exact = np.zeros((len(X), len(man["observables"])))
    for r in read_csv(root / "labels.csv"):
        exact[int(r["instance_id"]), int(r["observable_id"])] = float(r["value"])
    shadows = None
    if man.get("shadow_T"):
        shadows = [read_shadow_binary(root / "shadows" / f"instance_{k:05d}.glsh") for k in range(len(X))]
    return ExperimentData(lat, H, X, iseeds, sseeds, exact, shadows)
