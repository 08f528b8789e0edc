"""Independent reference computations used only by the tests."""

import numpy as np


def ridge_primal(A, y, lam):
    p = A.shape[1]
    return np.linalg.solve(A.T @ A + lam * np.eye(p), A.T @ y)


def ridge_dual(A, y, lam):
    n = A.shape[0]
    return A.T @ np.linalg.solve(A @ A.T + lam * np.eye(n), y)


def power_iteration_norm(A, iters=5000, tol=1e-15, seed=0):
    """Largest singular value by power iteration on A^T A."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(iters):
        w = A.T @ (A @ x)
        nrm = np.linalg.norm(w)
        x = w / nrm
        new = np.sqrt(nrm)
        if abs(new - sigma) <= tol * new:
            break
        sigma = new
    return float(np.linalg.norm(A @ x))


def jy_full_vector(x_S, x_C, x_hat_F, x_hat_S, sigma_v):
    """|| [0; x_S; x_C] - [x_hat_F; x_hat_S; 0] ||^2 + sigma_v^2 on stacked vectors."""
    truth = np.concatenate([np.zeros_like(x_hat_F), x_S, x_C])
    est = np.concatenate([x_hat_F, x_hat_S, np.zeros_like(x_C)])
    d = truth - est
    return float(d @ d) + sigma_v**2


def binomial_lower(floor, trials, n_se=3.0):
    return floor - n_se * np.sqrt(floor * (1 - floor) / trials)
