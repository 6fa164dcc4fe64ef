"""Sparse regression: penalized coordinate descent and constrained Frank-Wolfe.

Run: python demos/05_lasso.py
"""
import numpy as np

from groundlearn.lasso import Dataset, fit_constrained, fit_penalized, predict, training_error

rng = np.random.default_rng(0)
X = rng.standard_normal((40, 12))
w_true = np.zeros(12)
w_true[[1, 4, 9]] = [1.5, -2.0, 0.7]
y = X @ w_true + 0.05 * rng.standard_normal(40)
D = Dataset(X, y)

# Larger penalties keep fewer coefficients; the path shrinks toward zero.
for alpha in (1.0, 0.1, 0.01):
    m = fit_penalized(D, alpha)
    print(f"alpha = {alpha:5}: support {np.flatnonzero(m.coef).tolist()}, "
          f"train MSE {training_error(m, D):.4f}, {m.trace['iterations']} sweeps")

# The constrained form certifies its answer with a duality gap.
m = fit_constrained(D, B=np.abs(w_true).sum(), eps3=1e-8)
print(f"B = {m.hyper['B']}: ||w||_1 = {m.l1_norm():.4f}, gap {m.trace['duality_gap']:.1e}, "
      f"{m.trace['iterations']} iterations")
print("prediction for the first row:", round(float(predict(m, X[0])), 4), "vs label", round(y[0], 4))
