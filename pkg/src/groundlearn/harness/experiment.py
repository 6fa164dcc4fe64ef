"""Sweeps over shadow size, training-set size or lattice size."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..geometry import Lattice
from ..lasso import predict
from . import seeds
from .config import ExperimentConfig
from .data import ExperimentData, gen_dataset
from .io import write_csv, write_json
from .pool import run_jobs
from .training import CV_HEADER, TrainedObservable, build_feature_map, design_matrix, train_observable


@dataclass
class MetricsRecord:
    sweep: str
    value: object
    observable: str  # "all" or an observable id
    i: Optional[int]
    j: Optional[int]
    rmse: float
    train_error: float
    hyper: str
    n_train: int
    n_test: int
    rmse_normalized: Optional[float] = None
    wall_time: float = field(default=0.0, compare=False)  # kept in memory only

    def row(self) -> list:
        return [self.sweep, _value_text(self.value), self.observable, self.i, self.j, self.rmse,
                self.rmse_normalized, self.train_error, self.hyper, self.n_train, self.n_test]


METRICS_HEADER = ["sweep", "value", "observable", "i", "j", "rmse", "rmse_normalized", "train_error",
                  "hyperparameters", "n_train", "n_test"]


def _value_text(v) -> str:
    if isinstance(v, (list, tuple)):
        return "x".join(str(s) for s in v)
    return "" if v is None else repr(v)


class RunningRMSE:
    """One-pass RMSE accumulator; cross-checked against the batch formula."""

    def __init__(self):
        self.count = 0
        self.total = 0.0

    def add(self, errors) -> None:
        for e in np.ravel(errors):
            self.total += float(e) * float(e)
            self.count += 1

    @property
    def value(self) -> float:
        return float(np.sqrt(self.total / self.count))


def split_indices(M: int, N: int, master: int) -> tuple[np.ndarray, np.ndarray]:
    """First ``N`` entries of a seeded permutation train, the rest test; a
    larger ``N`` extends the training set of a smaller one."""
    perm = seeds.stream(master, seeds.SPLIT).permutation(M)
    train, test = np.sort(perm[:N]), np.sort(perm[N:])
    assert not set(train.tolist()) & set(test.tolist()), "train and test instances overlap"
    return train, test


@dataclass
class PointResult:
    records: list[MetricsRecord]
    cv_rows: list[list]
    predictions: list[list]
    trained: list[TrainedObservable]


def evaluate_point(cfg: ExperimentConfig, data: ExperimentData, sweep: str, value, N: int, T: Optional[int]) -> PointResult:
    """Train every observable on one split and score it on the held-out instances."""
    start = time.perf_counter()
    Y = data.labels(cfg.labels, T, cfg.median_of_means)
    train, test = split_indices(data.M, N, cfg.seed)
    fmaps = [build_feature_map(data.H, fp, cfg) for fp in cfg.features.grid()]
    full = [design_matrix(fm, data.couplings) for fm in fmaps]
    designs = [D[train] for D in full]
    batch_err, stream = [], RunningRMSE()
    records, cv_rows, preds, trained = [], [], [], []
    std = float(np.std(data.exact))
    scale = None if cfg.std_target is None or std == 0 else cfg.std_target / std
    for e, (i, j) in enumerate(data.edges):
        res = train_observable(cfg, data.H, data.couplings[train], Y[train, e], e, fmaps, designs)
        p = np.asarray(predict(res.model, full[res.feature_index][test]))
        err = p - data.exact[test, e]  # scored against exact values
        stream.add(err)
        batch_err.append(err)
        r = float(np.sqrt(np.mean(err**2)))
        records.append(MetricsRecord(sweep, value, str(e), i, j, r, res.train_error, _hyper(res.cv.best),
                                     len(train), len(test), None if scale is None else r * scale))
        cv_rows += [[_value_text(value), *row] for row in res.cv.table_rows(e)]
        preds += [[_value_text(value), int(k), e, float(pk), float(data.exact[k, e])] for k, pk in zip(test, p)]
        trained.append(res)
    batch = float(np.sqrt(np.mean(np.concatenate(batch_err) ** 2)))
    if abs(batch - stream.value) > 1e-12:
        raise AssertionError(f"streaming RMSE {stream.value} disagrees with batch RMSE {batch}")
    mean_train = float(np.mean([r.train_error for r in records]))
    overall = MetricsRecord(sweep, value, "all", None, None, batch, mean_train, "", len(train), len(test),
                            None if scale is None else batch * scale)
    overall.wall_time = time.perf_counter() - start
    return PointResult([overall] + records, cv_rows, preds, trained)


def _hyper(pt: dict) -> str:
    return ";".join(f"{k}={v!r}" for k, v in pt.items())


def _point_job(args) -> PointResult:
    cfg, data, sweep, value, N, T = args
    return evaluate_point(cfg, data, sweep, value, N, T)


def sweep_jobs(cfg: ExperimentConfig, data: Optional[ExperimentData] = None) -> list[tuple]:
    kind = cfg.sweep.kind
    if kind == "size":
        jobs = []
        for sides in cfg.sweep.values:
            d = gen_dataset(cfg, Lattice(tuple(sides)))
            jobs.append((cfg, d, kind, list(sides), cfg.n_train(), cfg.T))
        return jobs
    data = data if data is not None else gen_dataset(cfg)
    if kind == "T":
        return [(cfg, data, kind, T, cfg.n_train(), T) for T in cfg.sweep.values]
    if kind == "p":
        return [(cfg, data, kind, p, cfg.n_train(p), cfg.T) for p in cfg.sweep.values]
    return [(cfg, data, "none", None, cfg.n_train(), cfg.T)]


def run_experiment(cfg: ExperimentConfig, data: Optional[ExperimentData] = None,
                   out: Optional[str] = None) -> list[MetricsRecord]:
    """Run the configured sweep; with an output directory, files are rewritten
    after every sweep point so partial results survive a failure."""
    out = out if out is not None else cfg.out
    jobs = sweep_jobs(cfg, data)
    if cfg.labels == "exact":
        jobs = [j[:5] + (None,) for j in jobs]
    records: list[MetricsRecord] = []
    cv_rows: list[list] = []
    preds: list[list] = []
    results = run_jobs(_point_job, jobs, cfg.workers) if cfg.workers > 1 else (_point_job(j) for j in jobs)
    for res in results:
        records += res.records
        cv_rows += res.cv_rows
        preds += res.predictions
        if out:
            write_outputs(cfg, out, records, cv_rows, preds)
    return records


def write_outputs(cfg: ExperimentConfig, out, records, cv_rows, preds) -> None:
    out = Path(out)
    overall = [r for r in records if r.observable == "all"]
    write_csv(out / "metrics.csv", "metrics", METRICS_HEADER, (r.row() for r in overall))
    write_csv(out / "metrics_observables.csv", "metrics", METRICS_HEADER,
              (r.row() for r in records if r.observable != "all"))
    write_csv(out / "cv_table.csv", "cv", ["value"] + CV_HEADER, cv_rows)
    write_csv(out / "predictions.csv", "predictions",
              ["value", "instance_id", "observable_id", "predicted", "exact"], preds)
    write_json(out / "manifest.json", "manifest", {
        "package_version": __version__,
        "config": cfg.to_dict(),
        "sweep_points": [_value_text(r.value) for r in overall],
        "files": ["metrics.csv", "metrics_observables.csv", "cv_table.csv", "predictions.csv"],
        "seed_scheme": "SeedSequence([master, purpose, *counters]); instance=1 shadow=2 split=3 "
                       "cv_folds=4 solver=5 features=6 noise=7",
        "metric": "RMSE over test instances x edge correlations C_ij against exact values",
    })
