"""Generalization and training error.

The analytic generalization error of an estimate is exact for isotropic
Gaussian test features:

    J_y = ||x_hat_F||^2 + ||x_S - x_hat_S||^2 + ||x_C||^2 + sigma_v^2.

The empirical counterpart is the per-sample mean of squared test residuals,
which estimates the same expectation (a plain sum over the test set would
scale with ``n_test``). Training error stays an unnormalized squared norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .estimator import predict
from .model import Dataset, Estimate, GroundTruth

# Convention recorded in output metadata.
EMPIRICAL_NORMALIZATION = "mean over test samples (sum / n_test)"


@dataclass(frozen=True)
class ErrorReport:
    j_y_analytic: float
    err_F: float
    err_S: float
    err_C: float
    sigma_v2: float
    j_y_empirical: float | None = None
    j_y_empirical_se: float | None = None
    training_error: float | None = None

    @property
    def block_errors(self) -> tuple[float, float, float]:
        return (self.err_F, self.err_S, self.err_C)

    def decomposition_residual(self) -> float:
        """Relative mismatch between ``j_y_analytic`` and its block sum."""
        total = self.err_F + self.err_S + self.err_C + self.sigma_v2
        return abs(self.j_y_analytic - total) / max(abs(total), np.finfo(float).tiny)


def gen_error_analytic(truth: GroundTruth, est: Estimate, sigma_v: float) -> ErrorReport:
    if est.x_hat_S.shape != truth.x_S.shape or est.x_hat_C.shape != truth.x_C.shape:
        raise DimensionError(
            f"estimate blocks (S={est.x_hat_S.shape}, C={est.x_hat_C.shape}) do not match "
            f"ground truth (S={truth.x_S.shape}, C={truth.x_C.shape})"
        )
    err_F = float(est.x_hat_F @ est.x_hat_F)
    d = truth.x_S - est.x_hat_S
    err_S = float(d @ d)
    err_C = truth.norm_C2
    s2 = float(sigma_v) ** 2
    return ErrorReport(j_y_analytic=err_F + err_S + err_C + s2, err_F=err_F, err_S=err_S, err_C=err_C, sigma_v2=s2)


def squared_residual_stats(residuals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of squared residuals along axis 0."""
    sq = np.square(residuals)
    m = sq.shape[0]
    mean = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / math.sqrt(m) if m > 1 else np.full_like(mean, np.inf)
    return mean, se


def gen_error_empirical(test: Dataset, est: Estimate, with_se: bool = False):
    """Mean squared prediction residual on ``test``.

    With ``with_se`` returns ``(mean, standard_error)``.
    """
    if test.rows < 1:
        raise DimensionError("test set is empty")
    r = test.y - predict(test.A_F, test.A_S, est)
    mean, se = squared_residual_stats(r)
    if with_se:
        return float(mean), float(se)
    return float(mean)


def training_error(y, y_hat) -> float:
    """``||y - y_hat||^2``."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise DimensionError(f"shapes differ: {y.shape} vs {y_hat.shape}")
    r = y - y_hat
    return float(r @ r)
