"""l1-regularized least squares over feature space.

Penalized form ``(1/2N)||y - Xw||^2 + alpha ||w||_1`` by cyclic coordinate
descent with exact soft-threshold updates; constrained form
``min_{||w||_1 <= B} (1/N)||Xw - y||^2`` by away-step Frank-Wolfe with exact line
search and a duality-gap certificate.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numba import njit
from numba.core.errors import NumbaPerformanceWarning

from .errors import NumericError

# column slices of Fortran arrays are contiguous but typed with layout "A"
warnings.filterwarnings("ignore", category=NumbaPerformanceWarning)


@dataclass
class Dataset:
    X: object  # (N, p) ndarray or scipy sparse matrix
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.X.shape[0] != len(self.y):
            raise ValueError(f"{self.X.shape[0]} design rows but {len(self.y)} labels")

    @property
    def N(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.X[rows], self.y[rows], dict(self.meta))


@dataclass
class RegressionModel:
    coef: np.ndarray
    mode: str  # "penalized" | "constrained"
    hyper: dict
    intercept: float = 0.0
    trace: dict = field(default_factory=dict)
    columns: Optional[np.ndarray] = None  # global feature index of each coef
    dim: Optional[int] = None  # global feature dimension
    fingerprint: Optional[str] = None

    def __post_init__(self):
        self.coef = np.asarray(self.coef, dtype=float)
        if self.dim is None:
            self.dim = len(self.coef) if self.columns is None else None

    @property
    def converged(self) -> bool:
        return bool(self.trace.get("converged", True))

    def sparse_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero weights as sorted ``(global index, value)`` arrays."""
        nz = np.flatnonzero(self.coef)
        idx = nz if self.columns is None else np.asarray(self.columns)[nz]
        order = np.argsort(idx)
        return idx[order].astype(np.int64), self.coef[nz][order]

    def l1_norm(self) -> float:
        return float(np.abs(self.coef).sum())

    def to_json(self) -> dict:
        idx, val = self.sparse_weights()
        return {
            "mode": self.mode,
            "hyperparameters": self.hyper,
            "intercept": self.intercept,
            "dim": self.dim,
            "weights": [[int(i), float(v)] for i, v in zip(idx, val)],
            "feature_map_fingerprint": self.fingerprint,
            "solver_trace": {k: v for k, v in self.trace.items() if k != "objective_history"},
        }

    @classmethod
    def from_json(cls, data: dict) -> "RegressionModel":
        w = data["weights"]
        cols = np.array([i for i, _ in w], dtype=np.int64)
        coef = np.array([v for _, v in w], dtype=float)
        return cls(coef, data["mode"], data["hyperparameters"], data["intercept"],
                   data["solver_trace"], cols, data["dim"], data["feature_map_fingerprint"])

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)

    @classmethod
    def load(cls, path) -> "RegressionModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@njit(cache=True)
def _soft(z, a):
    if z > a:
        return z - a
    if z < -a:
        return z + a
    return 0.0


@njit(cache=True)
def _sweep_dense(X, r, w, colsq, alpha, idx):
    N = X.shape[0]
    maxd = 0.0
    for j in idx:
        if colsq[j] == 0.0:
            w[j] = 0.0
            continue
        old = w[j]
        rho = np.dot(X[:, j], r) / N + colsq[j] * old
        new = _soft(rho, alpha) / colsq[j]
        if new != old:
            r -= (new - old) * X[:, j]
            w[j] = new
            d = abs(new - old)
            if d > maxd:
                maxd = d
    return maxd


@njit(cache=True)
def _cd_dense(X, y, w, alpha, tol, max_iter, shuffle, seed):
    # Full sweeps alternate with sweeps restricted to the nonzero coordinates;
    # convergence is only declared after a full sweep and a KKT check.
    N, p = X.shape
    colsq = np.zeros(p)
    for j in range(p):
        colsq[j] = np.dot(X[:, j], X[:, j]) / N
    r = y - X @ w
    order = np.arange(p)
    if shuffle:
        np.random.seed(seed)
    hist = np.full(max_iter, np.nan)
    monotone = True
    it = 0
    kkt = np.inf
    converged = False
    full = True
    while it < max_iter:
        if full:
            if shuffle:
                np.random.shuffle(order)
            idx = order
        else:
            idx = order[w[order] != 0.0]
        maxd = _sweep_dense(X, r, w, colsq, alpha, idx)
        obj = 0.5 * np.dot(r, r) / N + alpha * np.sum(np.abs(w))
        if it > 0 and obj > hist[it - 1] * (1 + 1e-12) + 1e-15:
            monotone = False
        hist[it] = obj
        it += 1
        if maxd <= tol:
            if full:
                kkt = _kkt_dense(X, r, w, alpha)
                if kkt <= 10 * tol:
                    converged = True
                    break
            full = True
        else:
            full = False
    return w, it, hist[:it], monotone, converged, kkt


@njit(cache=True)
def _kkt_dense(X, r, w, alpha):
    N, p = X.shape
    worst = 0.0
    for j in range(p):
        g = np.dot(X[:, j], r) / N
        if w[j] == 0.0:
            v = abs(g) - alpha
            if v < 0:
                v = 0.0
        else:
            v = abs(g - alpha * np.sign(w[j]))
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def _col_dot(indptr, indices, data, j, r):
    s = 0.0
    for k in range(indptr[j], indptr[j + 1]):
        s += data[k] * r[indices[k]]
    return s


@njit(cache=True)
def _sweep_csc(indptr, indices, data, N, r, w, colsq, alpha, idx):
    maxd = 0.0
    for j in idx:
        if colsq[j] == 0.0:
            w[j] = 0.0
            continue
        old = w[j]
        rho = _col_dot(indptr, indices, data, j, r) / N + colsq[j] * old
        new = _soft(rho, alpha) / colsq[j]
        if new != old:
            delta = new - old
            for k in range(indptr[j], indptr[j + 1]):
                r[indices[k]] -= delta * data[k]
            w[j] = new
            if abs(delta) > maxd:
                maxd = abs(delta)
    return maxd


@njit(cache=True)
def _kkt_csc(indptr, indices, data, N, r, w, alpha):
    worst = 0.0
    for j in range(len(indptr) - 1):
        g = _col_dot(indptr, indices, data, j, r) / N
        if w[j] == 0.0:
            v = max(abs(g) - alpha, 0.0)
        else:
            v = abs(g - alpha * np.sign(w[j]))
        worst = max(worst, v)
    return worst


@njit(cache=True)
def _cd_csc(indptr, indices, data, N, y, w, alpha, tol, max_iter, shuffle, seed):
    p = len(indptr) - 1
    colsq = np.zeros(p)
    r = y.copy()
    for j in range(p):
        for k in range(indptr[j], indptr[j + 1]):
            colsq[j] += data[k] * data[k]
            r[indices[k]] -= data[k] * w[j]
        colsq[j] /= N
    order = np.arange(p)
    if shuffle:
        np.random.seed(seed)
    hist = np.full(max_iter, np.nan)
    monotone = True
    it = 0
    kkt = np.inf
    converged = False
    full = True
    while it < max_iter:
        if full:
            if shuffle:
                np.random.shuffle(order)
            idx = order
        else:
            idx = order[w[order] != 0.0]
        maxd = _sweep_csc(indptr, indices, data, N, r, w, colsq, alpha, idx)
        obj = 0.5 * np.dot(r, r) / N + alpha * np.sum(np.abs(w))
        if it > 0 and obj > hist[it - 1] * (1 + 1e-12) + 1e-15:
            monotone = False
        hist[it] = obj
        it += 1
        if maxd <= tol:
            if full:
                kkt = _kkt_csc(indptr, indices, data, N, r, w, alpha)
                if kkt <= 10 * tol:
                    converged = True
                    break
            full = True
        else:
            full = False
    return w, it, hist[:it], monotone, converged, kkt


def _center(D: Dataset, fit_intercept: bool):
    X, y = D.X, D.y
    if not fit_intercept:
        return X, y, None, 0.0
    if sp.issparse(X):
        X = X.toarray()
    xm = np.asarray(X).mean(axis=0)
    ym = float(y.mean())
    return np.asarray(X) - xm, y - ym, xm, ym


def penalized_objective(X, y, w, alpha) -> float:
    r = y - X @ w
    return float(0.5 * np.dot(r, r) / len(y) + alpha * np.abs(w).sum())


def fit_penalized(
    D: Dataset,
    alpha: float,
    tol: float = 1e-8,
    max_iter: int = 10000,
    seed: int = 0,
    shuffle: bool = False,
    fit_intercept: bool = False,
    w0: Optional[np.ndarray] = None,
) -> RegressionModel:
    """Coordinate descent until the largest coordinate change is at most ``tol``
    and the subgradient residual is at most ``10 * tol``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    X, y, xm, ym = _center(D, fit_intercept)
    w = np.zeros(D.p) if w0 is None else np.array(w0, dtype=float)
    if sp.issparse(X):
        Xc = sp.csc_matrix(X)
        Xc.sort_indices()
        w, it, hist, mono, conv, kkt = _cd_csc(
            Xc.indptr.astype(np.int64), Xc.indices.astype(np.int64), Xc.data.astype(float),
            D.N, y, w, float(alpha), float(tol), int(max_iter), bool(shuffle), int(seed),
        )
    else:
        w, it, hist, mono, conv, kkt = _cd_dense(
            np.asfortranarray(X, dtype=float), y, w, float(alpha), float(tol), int(max_iter), bool(shuffle), int(seed)
        )
    if not np.all(np.isfinite(w)):
        raise NumericError("coordinate descent produced non-finite weights")
    if not mono:
        raise NumericError("penalized objective increased between sweeps")
    if not conv:
        warnings.warn(f"coordinate descent stopped after {it} sweeps without meeting tol={tol}")
    intercept = 0.0 if xm is None else ym - float(xm @ w)
    trace = {
        "iterations": int(it),
        "final_objective": float(hist[-1]) if len(hist) else float("nan"),
        "kkt_residual": float(kkt),
        "converged": bool(conv),
        "objective_history": hist,
    }
    hyper = {"alpha": float(alpha), "tol": float(tol), "fit_intercept": bool(fit_intercept)}
    return RegressionModel(w, "penalized", hyper, intercept, trace)


def constrained_objective(X, y, w) -> float:
    r = X @ w - y
    return float(np.dot(r, r) / len(y))


def fit_constrained(
    D: Dataset,
    B: float,
    eps3: float = 1e-6,
    max_iter: int = 100000,
    seed: int = 0,
    w0: Optional[np.ndarray] = None,
) -> RegressionModel:
    """Frank-Wolfe with away steps over the l1 ball of radius ``B``; stops once
    the duality gap certifies an objective within ``eps3 / 2`` of the optimum.

    Iterates are kept as convex weights on the vertices ``+-B e_j``, so every
    one of them is feasible. Away steps remove weight from the worst active
    vertex, which gives linear rather than sublinear convergence on this
    polytope. ``seed`` is accepted for interface symmetry; the iteration is
    deterministic.
    """
    if B < 0 or eps3 <= 0:
        raise ValueError("need B >= 0 and eps3 > 0")
    X = D.X.tocsc() if sp.issparse(D.X) else np.asarray(D.X, dtype=float)
    y, N, p = D.y, D.N, D.p
    w = np.zeros(p) if w0 is None else np.array(w0, dtype=float)
    if np.abs(w).sum() > B * (1 + 1e-12):
        raise ValueError("warm start lies outside the l1 ball")

    def column(j):
        return X[:, [j]].toarray().ravel() if sp.issparse(X) else X[:, j]

    # lam[0, j] weights +B e_j and lam[1, j] weights -B e_j
    lam = np.zeros((2, p))
    if B > 0:
        lam[0] = np.maximum(w, 0) / B
        lam[1] = np.maximum(-w, 0) / B
        rest = 1.0 - lam.sum()
        lam[:, 0] += rest / 2  # the centre is the midpoint of +-B e_0
        w = B * (lam[0] - lam[1])
    Xw = X @ w
    gap = np.inf
    max_l1 = np.abs(w).sum()
    it = 0
    for it in range(1, max_iter + 1):
        grad = (2.0 / N) * (X.T @ (Xw - y))
        if not np.all(np.isfinite(grad)):
            raise NumericError("non-finite gradient in Frank-Wolfe")
        j = int(np.argmax(np.abs(grad)))
        s_j = -B * np.sign(grad[j]) if grad[j] != 0 else 0.0
        gw = float(grad @ w)
        gap = gw - s_j * grad[j]
        if gap <= eps3 / 2:
            break
        # away vertex: the active vertex with the largest gradient inner product
        scores = np.where(lam > 0, B * np.array([grad, -grad]), -np.inf)
        a_sign, a_j = np.unravel_index(int(np.argmax(scores)), scores.shape)
        away_gap = float(scores[a_sign, a_j]) - gw
        if gap >= away_gap:
            Xs = s_j * column(j)
            Xd, slope, gmax = Xs - Xw, -gap, 1.0
        else:
            Xa = (B if a_sign == 0 else -B) * column(a_j)
            la = lam[a_sign, a_j]
            Xd, slope, gmax = Xw - Xa, -away_gap, (np.inf if la >= 1 else la / (1.0 - la))
        curv = (2.0 / N) * float(Xd @ Xd)
        step = gmax if curv <= 0 else min(gmax, -slope / curv)
        if not np.isfinite(step):
            raise NumericError("unbounded line search in Frank-Wolfe")
        if gap >= away_gap:
            lam *= 1.0 - step
            lam[0 if s_j > 0 else 1, j] += step
        else:
            lam *= 1.0 + step
            lam[a_sign, a_j] -= step
            if step == gmax:
                lam[a_sign, a_j] = 0.0  # drop step
        w = B * (lam[0] - lam[1])
        Xw = X @ w if it % 256 == 0 else Xw + step * Xd  # refresh against drift
        max_l1 = max(max_l1, np.abs(w).sum())
    else:
        warnings.warn(f"Frank-Wolfe stopped after {max_iter} iterations with gap {gap:.3e}")
    obj = constrained_objective(X, y, w)
    trace = {
        "iterations": int(it),
        "final_objective": obj,
        "duality_gap": float(gap),
        "converged": bool(gap <= eps3 / 2),
        "max_iterate_l1": float(max_l1),
    }
    return RegressionModel(w, "constrained", {"B": float(B), "eps3": float(eps3)}, 0.0, trace)


def predict(model: RegressionModel, features) -> np.ndarray | float:
    """``w . phi + intercept`` for one feature vector or a batch of rows.

    Sparse inputs are indexed in the model's global feature space.
    """
    single = False
    if sp.issparse(features):
        F = sp.csr_matrix(features)
        if model.dim is not None and F.shape[1] != model.dim:
            raise ValueError(f"feature dimension {F.shape[1]} != model dimension {model.dim}")
        idx, val = model.sparse_weights()
        out = np.full(F.shape[0], model.intercept)
        for r in range(F.shape[0]):
            cols = F.indices[F.indptr[r] : F.indptr[r + 1]]
            dat = F.data[F.indptr[r] : F.indptr[r + 1]]
            if len(idx) == 0:
                continue
            pos = np.clip(np.searchsorted(idx, cols), 0, len(idx) - 1)
            hit = idx[pos] == cols
            out[r] += float(np.dot(dat[hit], val[pos[hit]]))
        return out
    F = np.asarray(features, dtype=float)
    if F.ndim == 1:
        single = True
        F = F[None, :]
    if model.columns is None:
        if F.shape[1] != len(model.coef):
            raise ValueError(f"feature dimension {F.shape[1]} != model dimension {len(model.coef)}")
        out = F @ model.coef + model.intercept
    else:
        if model.dim is not None and F.shape[1] != model.dim:
            raise ValueError(f"feature dimension {F.shape[1]} != model dimension {model.dim}")
        idx, val = model.sparse_weights()
        out = F[:, idx] @ val + model.intercept
    return float(out[0]) if single else out


def training_error(model: RegressionModel, D: Dataset) -> float:
    """Mean squared residual ``(1/N) sum (h(x) - y)^2``."""
    if D.N == 0:
        raise ValueError("empty dataset")
    resid = np.asarray(predict(model, D.X)).ravel() - D.y
    return float(np.mean(resid**2))
