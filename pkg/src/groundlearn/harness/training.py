"""Feature construction, grid-searched cross-validation and final fits."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..errors import ConfigError
from ..features import IndicatorFeatureMap, RffMap, indicator_design, rescale
from ..hamiltonian import ParamHamiltonian
from ..lasso import Dataset, RegressionModel, fit_constrained, fit_penalized, predict
from . import seeds
from .config import ExperimentConfig

FeatureMap = Union[RffMap, IndicatorFeatureMap]


def build_feature_map(H: ParamHamiltonian, point: dict, cfg: ExperimentConfig) -> FeatureMap:
    if cfg.features.kind == "rff":
        # frequencies depend on the master seed and the configured feature seed only,
        # so a smaller R_feat reuses the leading rows of a larger one
        seed = seeds.derive_seed(cfg.seed, seeds.FEATURES, cfg.features.seed)
        return RffMap.build(H, point["delta1"], point["R_feat"], point["gamma"], seed)
    return IndicatorFeatureMap.build(H, point["delta1"], point["delta2"])


def design_matrix(fm: FeatureMap, couplings: np.ndarray):
    X = rescale(couplings)
    if isinstance(fm, RffMap):
        return fm.transform(X)
    return indicator_design(fm, X)


def fold_slices(n: int, folds: int, master: int, key: int = 0) -> list[np.ndarray]:
    """Contiguous folds of a seeded permutation of ``range(n)``."""
    if folds < 2 or n < folds:
        raise ConfigError(f"{folds}-fold cross-validation needs at least {folds} training instances, got {n}")
    perm = seeds.stream(master, seeds.CV_FOLDS, key).permutation(n)
    return np.array_split(perm, folds)


def fit_one(Phi, y, solver_point: dict, cfg: ExperimentConfig, w0: Optional[np.ndarray] = None) -> RegressionModel:
    s = cfg.solver
    D = Dataset(Phi, y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if s.kind == "penalized":
            return fit_penalized(D, solver_point["alpha"], tol=s.tol, max_iter=s.max_iter,
                                 fit_intercept=s.fit_intercept, w0=w0)
        return fit_constrained(D, solver_point["B"], eps3=s.eps3, max_iter=s.max_iter)


def rmse(pred, truth) -> float:
    d = np.asarray(pred, dtype=float) - np.asarray(truth, dtype=float)
    return float(np.sqrt(np.mean(d**2)))


@dataclass
class CVResult:
    points: list[dict]  # merged feature + solver hyperparameters, grid order
    scores: np.ndarray  # mean fold RMSE per point
    fold_scores: np.ndarray  # (points, folds)
    best_index: int

    @property
    def best(self) -> dict:
        return dict(self.points[self.best_index])

    def table_rows(self, observable: int) -> list[list]:
        rows = []
        for p, pt in enumerate(self.points):
            for f, s in enumerate(self.fold_scores[p]):
                rows.append([observable, p, _hyper_text(pt), f, s, p == self.best_index])
        return rows


CV_HEADER = ["observable_id", "point", "hyperparameters", "fold", "rmse", "selected"]


def _hyper_text(pt: dict) -> str:
    return ";".join(f"{k}={v!r}" for k, v in pt.items())


def _solver_order(cfg: ExperimentConfig) -> list[int]:
    """Fit order along the solver grid: strongest regularization first, for warm starts."""
    grid = cfg.solver.grid()
    if cfg.solver.kind == "penalized":
        return sorted(range(len(grid)), key=lambda k: -grid[k]["alpha"])
    return list(range(len(grid)))


def cross_validate(cfg: ExperimentConfig, designs: list, y: np.ndarray, fold_key: int = 0) -> CVResult:
    """Grid search over ``feature points x solver points`` on one training set.

    ``designs[f]`` is the training design matrix for feature point ``f``.  The
    winner minimizes mean fold RMSE; ties go to the earliest grid point.
    """
    y = np.asarray(y, dtype=float)
    fpoints, spoints = cfg.features.grid(), cfg.solver.grid()
    if len(designs) != len(fpoints):
        raise ValueError("one design matrix per feature-map grid point is required")
    folds = fold_slices(len(y), cfg.folds, cfg.seed, fold_key)
    points = [{**fp, **sp} for fp in fpoints for sp in spoints]
    fold_scores = np.zeros((len(points), len(folds)))
    order = _solver_order(cfg)
    for f, Phi in enumerate(designs):
        for k, held in enumerate(folds):
            train = np.setdiff1d(np.arange(len(y)), held)
            Ptr, Pte = Phi[train], Phi[held]
            w = None
            for s in order:
                model = fit_one(Ptr, y[train], spoints[s], cfg, w0=w)
                if cfg.solver.kind == "penalized" and not cfg.solver.fit_intercept:
                    w = model.coef
                fold_scores[f * len(spoints) + s, k] = rmse(predict(model, Pte), y[held])
    scores = fold_scores.mean(axis=1)
    return CVResult(points, scores, fold_scores, int(np.argmin(scores)))


@dataclass
class TrainedObservable:
    observable: int
    model: RegressionModel
    feature_map: FeatureMap
    cv: CVResult
    train_error: float
    feature_index: int = 0


def train_observable(cfg: ExperimentConfig, H: ParamHamiltonian, couplings: np.ndarray, y: np.ndarray,
                     observable: int, fmaps: Optional[list] = None, designs: Optional[list] = None,
                     fold_key: int = 0) -> TrainedObservable:
    """Cross-validate on ``(couplings, y)``, then refit the winner on all of it."""
    fpoints = cfg.features.grid()
    if fmaps is None:
        fmaps = [build_feature_map(H, fp, cfg) for fp in fpoints]
    if designs is None:
        designs = [design_matrix(fm, couplings) for fm in fmaps]
    cv = cross_validate(cfg, designs, y, fold_key)
    f = cv.best_index // len(cfg.solver.grid())
    s = cv.best_index % len(cfg.solver.grid())
    model = fit_one(designs[f], y, cfg.solver.grid()[s], cfg)
    model.fingerprint = fmaps[f].fingerprint()
    model.hyper = {**model.hyper, **cv.best}
    if model.dim is None:
        model.dim = designs[f].shape[1]
    err = float(np.mean((np.asarray(predict(model, designs[f])) - y) ** 2))
    return TrainedObservable(observable, model, fmaps[f], cv, err, f)
