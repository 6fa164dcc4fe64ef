import numpy as np
import pytest
import scipy.sparse as sp

from groundlearn.lasso import (Dataset, RegressionModel, fit_constrained, fit_penalized, penalized_objective, predict,
                               training_error)

from oracles import constrained_objective, constrained_pg, lasso_fista, lasso_objective


def problem(seed, N=25, p=10, sparse=False):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, p))
    w = np.where(rng.random(p) < 0.4, rng.standard_normal(p), 0.0)
    y = X @ w + 0.1 * rng.standard_normal(N)
    return (sp.csr_matrix(np.where(np.abs(X) > 0.7, X, 0.0)) if sparse else X), y


def test_large_alpha_kills_everything():
    X, y = problem(0)
    alpha = np.max(np.abs(X.T @ y)) / len(y)
    assert np.all(fit_penalized(Dataset(X, y), alpha).coef == 0)


def test_one_dimensional_soft_threshold():
    m = fit_penalized(Dataset(np.ones((2, 1)), np.ones(2)), 0.5)
    assert m.coef[0] == pytest.approx(0.5, abs=1e-8)
    grid = np.linspace(-1, 2, 30001)
    scan = [penalized_objective(np.ones((2, 1)), np.ones(2), np.array([w]), 0.5) for w in grid]
    assert grid[int(np.argmin(scan))] == pytest.approx(0.5, abs=1e-4)


def test_small_alpha_reaches_least_squares():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((8, 8))
    y = rng.standard_normal(8)
    m = fit_penalized(Dataset(X, y), 1e-11, tol=1e-13, max_iter=10**6)
    assert np.allclose(m.coef, np.linalg.solve(X, y), atol=1e-8)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("sparse", [False, True])
def test_penalized_matches_oracle(seed, sparse):
    X, y = problem(seed, sparse=sparse)
    Xd = X.toarray() if sparse else X
    alpha = 0.05
    m = fit_penalized(Dataset(X, y), alpha, tol=1e-10, max_iter=10**5)
    ref = lasso_fista(Xd, y, alpha)
    assert lasso_objective(Xd, y, m.coef, alpha) <= lasso_objective(Xd, y, ref, alpha) + 1e-9
    assert m.converged and m.trace["kkt_residual"] <= 1e-9


def test_objective_history_is_monotone():
    X, y = problem(3)
    h = fit_penalized(Dataset(X, y), 0.01, tol=1e-10).trace["objective_history"]
    assert np.all(np.diff(h) <= 1e-15)


def test_warm_start_and_shuffle_reach_same_optimum():
    X, y = problem(4)
    D = Dataset(X, y)
    a = fit_penalized(D, 0.02, tol=1e-11)
    b = fit_penalized(D, 0.02, tol=1e-11, w0=a.coef * 0.5, shuffle=True, seed=3)
    assert penalized_objective(X, y, b.coef, 0.02) == pytest.approx(penalized_objective(X, y, a.coef, 0.02), abs=1e-10)


def test_intercept_is_recovered():
    X, y = problem(5)
    m = fit_penalized(Dataset(X, y + 3.0), 1e-3, tol=1e-10, fit_intercept=True)
    assert m.intercept == pytest.approx(3.0 + np.mean(y) - X.mean(axis=0) @ m.coef, abs=1e-12)
    assert abs(np.mean(predict(m, X) - (y + 3.0))) < 1e-10


def test_constrained_zero_radius():
    X, y = problem(6)
    m = fit_constrained(Dataset(X, y), 0.0)
    assert np.all(m.coef == 0) and m.trace["final_objective"] == pytest.approx(np.mean(y**2))


def test_constrained_active_constraint():
    X = np.ones((4, 1))
    y = np.full(4, 0.5)
    m = fit_constrained(Dataset(X, y), 0.3, eps3=1e-10)
    assert m.coef[0] == pytest.approx(0.3, abs=1e-8)


def test_constrained_large_ball_is_least_squares():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((20, 3))
    y = rng.standard_normal(20)
    m = fit_constrained(Dataset(X, y), 100.0, eps3=1e-10, max_iter=10**6)
    ls = np.linalg.lstsq(X, y, rcond=None)[0]
    assert constrained_objective(X, y, m.coef) <= constrained_objective(X, y, ls) + 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_constrained_matches_oracle(seed):
    X, y = problem(seed, N=20, p=8)
    B, eps3 = 0.8, 1e-6
    m = fit_constrained(Dataset(X, y), B, eps3=eps3)
    assert m.trace["duality_gap"] <= eps3 / 2
    assert np.abs(m.coef).sum() <= B + 1e-12 and m.trace["max_iterate_l1"] <= B + 1e-12
    ref = constrained_pg(X, y, B)
    assert constrained_objective(X, y, m.coef) <= constrained_objective(X, y, ref) + eps3 / 2


def test_predict_contract():
    zero = RegressionModel(np.zeros(5), "penalized", {})
    assert predict(zero, np.arange(5.0)) == 0.0
    one_hot = RegressionModel(np.array([0, 0, 2.5, 0]), "penalized", {})
    assert predict(one_hot, np.eye(4)[2]) == 2.5
    rng = np.random.default_rng(8)
    w = np.where(rng.random(50) < 0.2, rng.standard_normal(50), 0.0)
    F = sp.random(6, 50, density=0.3, random_state=9, format="csr")
    m = RegressionModel(w, "penalized", {})
    assert np.allclose(predict(m, F), F.toarray() @ w, atol=1e-12)
    with pytest.raises(ValueError):
        predict(m, np.ones(49))


def test_training_error_contract():
    X, y = problem(10)
    assert training_error(RegressionModel(np.zeros(X.shape[1]), "penalized", {}), Dataset(X, y)) == pytest.approx(
        np.mean(y**2))
    rng = np.random.default_rng(11)
    A = rng.standard_normal((5, 5))
    w = rng.standard_normal(5)
    assert training_error(RegressionModel(w, "penalized", {}), Dataset(A, A @ w)) == pytest.approx(0, abs=1e-25)
    m = fit_penalized(Dataset(X, y), 0.03)
    naive = sum((float(X[i] @ m.coef) - y[i]) ** 2 for i in range(len(y))) / len(y)
    assert training_error(m, Dataset(X, y)) == pytest.approx(naive, abs=1e-12)


def test_model_json_round_trip(tmp_path):
    X, y = problem(12)
    m = fit_penalized(Dataset(X, y), 0.05)
    m.save(tmp_path / "m.json")
    back = RegressionModel.load(tmp_path / "m.json")
    assert np.allclose(predict(back, X), predict(m, X), atol=1e-14)


def test_argument_guards():
    D = Dataset(np.ones((2, 1)), np.ones(2))
    with pytest.raises(ValueError):
        fit_penalized(D, 0.0)
    with pytest.raises(ValueError):
        fit_constrained(D, -1.0)
    with pytest.raises(ValueError):
        Dataset(np.ones((3, 1)), np.ones(2))
