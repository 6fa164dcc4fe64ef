"""Experiment configuration read from JSON.

A minimal config::

    {"lattice": {"sides": [2, 3]}, "M": 60, "N": 30, "T": 500, "labels": "shadow"}

Everything else has defaults: random Fourier features with the grids
``R_feat in {5, 10, 20, 40}`` and ``gamma in {0.4, ..., 0.75}``, penalized LASSO
over ``alpha in {2^-8, ..., 2^-5}``, 4 folds.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..errors import ConfigError
from ..features import grid_levels
from ..geometry import Lattice

RFF_R_GRID = [5, 10, 20, 40]
RFF_GAMMA_GRID = [0.4, 0.5, 0.6, 0.65, 0.7, 0.75]
ALPHA_GRID = [2.0**-8, 2.0**-7, 2.0**-6, 2.0**-5]
T_GRID = [50, 100, 250, 500, 1000]
P_GRID = [0.1, 0.3, 0.5, 0.7, 0.9]

_TOP_KEYS = {
    "lattice", "family", "normalized", "M", "N", "p", "T", "labels", "feature_map", "solver",
    "folds", "seed", "out", "workers", "sweep", "median_of_means", "std_target", "norm", "probe",
    "importance",
}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _grid(value, name: str, cast=float) -> list:
    vals = value if isinstance(value, list) else [value]
    _require(len(vals) > 0, f"{name} grid is empty")
    try:
        return [cast(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _no_extra(d: dict, allowed: set, where: str) -> None:
    extra = set(d) - allowed
    _require(not extra, f"unknown keys in {where}: {sorted(extra)}")


@dataclass
class FeatureSpec:
    kind: str = "rff"
    delta1: list = field(default_factory=lambda: [0.0])
    # rff
    R_feat: list = field(default_factory=lambda: list(RFF_R_GRID))
    gamma: list = field(default_factory=lambda: list(RFF_GAMMA_GRID))
    seed: int = 0
    # indicator
    delta2: list = field(default_factory=lambda: [0.5])

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpec":
        kind = d.get("kind", "rff")
        _require(kind in ("rff", "indicator"), f"feature_map.kind must be rff or indicator, got {kind!r}")
        if kind == "rff":
            _no_extra(d, {"kind", "delta1", "R_feat", "gamma", "seed"}, "feature_map")
        else:
            _no_extra(d, {"kind", "delta1", "delta2"}, "feature_map")
        spec = cls(kind=kind)
        spec.delta1 = _grid(d.get("delta1", spec.delta1), "delta1")
        _require(all(v >= 0 for v in spec.delta1), "delta1 must be nonnegative")
        if kind == "rff":
            spec.R_feat = _grid(d.get("R_feat", spec.R_feat), "R_feat", int)
            spec.gamma = _grid(d.get("gamma", spec.gamma), "gamma")
            spec.seed = int(d.get("seed", 0))
            _require(all(r >= 1 for r in spec.R_feat), "R_feat must be positive")
            _require(all(g > 0 for g in spec.gamma), "gamma must be positive")
        else:
            spec.delta2 = _grid(d.get("delta2", spec.delta2), "delta2")
            for v in spec.delta2:
                try:
                    grid_levels(v)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
        return spec

    def grid(self) -> list[dict]:
        """Feature-map hyperparameter points in grid order."""
        if self.kind == "rff":
            return [{"delta1": a, "R_feat": r, "gamma": g} for a in self.delta1 for r in self.R_feat for g in self.gamma]
        return [{"delta1": a, "delta2": b} for a in self.delta1 for b in self.delta2]

    def to_dict(self) -> dict:
        if self.kind == "rff":
            return {"kind": "rff", "delta1": self.delta1, "R_feat": self.R_feat, "gamma": self.gamma, "seed": self.seed}
        return {"kind": "indicator", "delta1": self.delta1, "delta2": self.delta2}


@dataclass
class SolverSpec:
    kind: str = "penalized"
    alpha: list = field(default_factory=lambda: list(ALPHA_GRID))
    B: list = field(default_factory=lambda: [1.0])
    eps3: float = 1e-6
    tol: float = 1e-4
    max_iter: int = 100000
    fit_intercept: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "SolverSpec":
        kind = d.get("kind", "penalized")
        _require(kind in ("penalized", "constrained"), f"solver.kind must be penalized or constrained, got {kind!r}")
        _no_extra(d, {"kind", "alpha", "B", "eps3", "tol", "max_iter", "fit_intercept"}, "solver")
        spec = cls(kind=kind)
        spec.alpha = _grid(d.get("alpha", spec.alpha), "alpha")
        spec.B = _grid(d.get("B", spec.B), "B")
        spec.eps3 = float(d.get("eps3", spec.eps3))
        spec.tol = float(d.get("tol", spec.tol))
        spec.max_iter = int(d.get("max_iter", spec.max_iter))
        spec.fit_intercept = bool(d.get("fit_intercept", False))
        _require(all(a > 0 for a in spec.alpha), "alpha must be positive")
        _require(all(b >= 0 for b in spec.B), "B must be nonnegative")
        _require(spec.eps3 > 0 and spec.tol > 0 and spec.max_iter > 0, "solver tolerances must be positive")
        return spec

    def grid(self) -> list[dict]:
        if self.kind == "penalized":
            return [{"alpha": a} for a in self.alpha]
        return [{"B": b} for b in self.B]

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "tol": self.tol, "max_iter": self.max_iter, "fit_intercept": self.fit_intercept}
        if self.kind == "penalized":
            out["alpha"] = self.alpha
        else:
            out.update(B=self.B, eps3=self.eps3)
        return out


@dataclass
class SweepSpec:
    kind: str  # "T" | "p" | "size" | "none"
    values: list

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "SweepSpec":
        if d is None:
            return cls("none", [None])
        _no_extra(d, {"kind", "values"}, "sweep")
        kind = d.get("kind")
        if kind == "T":
            vals = _grid(d.get("values", T_GRID), "T", int)
            _require(all(v >= 1 for v in vals), "T values must be positive")
        elif kind == "p":
            vals = _grid(d.get("values", P_GRID), "p")
            _require(all(0 < v < 1 for v in vals), "p values must lie in (0, 1)")
        elif kind == "size":
            vals = d.get("values")
            _require(isinstance(vals, list) and len(vals) > 0, "size sweep needs a list of lattice sides")
            vals = [[int(s) for s in v] for v in vals]
        else:
            raise ConfigError(f"sweep.kind must be T, p or size, got {kind!r}")
        return cls(kind, vals)

    def to_dict(self) -> Optional[dict]:
        return None if self.kind == "none" else {"kind": self.kind, "values": self.values}


@dataclass
class ExperimentConfig:
    lattice: Lattice
    M: int = 60
    N: Optional[int] = None
    p: Optional[float] = None
    T: int = 500
    labels: str = "shadow"
    family: str = "heisenberg"
    normalized: bool = False
    features: FeatureSpec = field(default_factory=FeatureSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    folds: int = 4
    seed: int = 0
    out: Optional[str] = None
    workers: int = 1
    sweep: SweepSpec = field(default_factory=lambda: SweepSpec("none", [None]))
    median_of_means: Optional[int] = None
    std_target: Optional[float] = None
    extra: dict = field(default_factory=dict)  # sections for verify-norm, probe-locality, importance

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        _require(isinstance(d, dict), "config must be a JSON object")
        _no_extra(d, _TOP_KEYS, "config")
        lat = d.get("lattice")
        _require(isinstance(lat, dict) and "sides" in lat, "lattice.sides is required")
        try:
            lattice = Lattice.from_config(lat)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"lattice: {exc}") from None
        cfg = cls(lattice)
        cfg.M = int(d.get("M", cfg.M))
        cfg.N = None if d.get("N") is None else int(d["N"])
        cfg.p = None if d.get("p") is None else float(d["p"])
        cfg.T = int(d.get("T", cfg.T))
        cfg.labels = d.get("labels", cfg.labels)
        cfg.family = d.get("family", cfg.family)
        cfg.normalized = bool(d.get("normalized", False))
        cfg.features = FeatureSpec.from_dict(d.get("feature_map", {}))
        cfg.solver = SolverSpec.from_dict(d.get("solver", {}))
        cfg.folds = int(d.get("folds", cfg.folds))
        cfg.seed = int(d.get("seed", cfg.seed))
        cfg.out = d.get("out")
        cfg.workers = int(d.get("workers", 1))
        cfg.sweep = SweepSpec.from_dict(d.get("sweep"))
        cfg.median_of_means = d.get("median_of_means")
        cfg.std_target = None if d.get("std_target") is None else float(d["std_target"])
        cfg.extra = {k: copy.deepcopy(d[k]) for k in ("norm", "probe", "importance") if k in d}
        cfg.validate()
        return cfg

    def validate(self) -> None:
        _require(self.family == "heisenberg", f"unknown model family {self.family!r}")
        _require(self.labels in ("exact", "shadow"), "labels must be exact or shadow")
        _require(self.M >= 2, "M must be at least 2")
        _require(self.N is None or self.p is None, "give N or p, not both")
        _require(self.p is None or 0 < self.p < 1, "p must lie in (0, 1)")
        _require(self.folds >= 2, "folds must be at least 2")
        _require(self.T >= 1, "T must be positive")
        _require(self.workers >= 1, "workers must be positive")
        _require(0 <= self.seed < 2**64, "seed must be an unsigned 64-bit integer")
        n_train = self.n_train()
        _require(1 <= n_train < self.M, f"N={n_train} must lie in 1..M-1 so that a test split remains")
        _require(self.sweep.kind != "size" or all(len(s) in (1, 2) for s in self.sweep.values),
                 "size sweep lattices must be 1D or 2D")

    def n_train(self, p: Optional[float] = None) -> int:
        """Training-set size ``N`` (default ``M // 2``), or ``round(p M)`` for a split fraction."""
        p = p if p is not None else self.p
        if p is not None:
            return max(1, min(self.M - 1, int(math.floor(p * self.M + 0.5))))
        return self.N if self.N is not None else self.M // 2

    def shadow_budget(self) -> int:
        """Largest shadow size needed; shorter runs use prefixes."""
        if self.sweep.kind == "T":
            return max(max(self.sweep.values), self.T)
        return self.T

    def with_overrides(self, seed: Optional[int] = None, out: Optional[str] = None,
                       workers: Optional[int] = None) -> "ExperimentConfig":
        cfg = copy.deepcopy(self)
        if seed is not None:
            cfg.seed = int(seed)
        if out is not None:
            cfg.out = out
        if workers is not None:
            cfg.workers = int(workers)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        """Canonical form written to manifests; ``out`` and ``workers`` are omitted
        because they do not change any result."""
        d = {
            "lattice": self.lattice.to_config(),
            "family": self.family,
            "normalized": self.normalized,
            "M": self.M,
            "N": self.N,
            "p": self.p,
            "T": self.T,
            "labels": self.labels,
            "feature_map": self.features.to_dict(),
            "solver": self.solver.to_dict(),
            "folds": self.folds,
            "seed": self.seed,
            "sweep": self.sweep.to_dict(),
            "median_of_means": self.median_of_means,
            "std_target": self.std_target,
        }
        d.update(copy.deepcopy(self.extra))
        return d


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)
