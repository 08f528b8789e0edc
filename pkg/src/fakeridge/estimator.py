"""Closed-form ridge and minimum-norm solvers for the misspecified model.

The ridge estimate is computed in its dual shape,

    x_bar_hat = A_bar^T (A_bar A_bar^T + lam I_n)^{-1} y,

through a Cholesky factorization of the ``n x n`` shifted Gram matrix, so the
cost stays ``O(n^2 p_bar + n^3)`` as fake features are added. When the model
is underparameterized (``n > p_bar``) the ``p_bar x p_bar`` primal system is
smaller and is used instead. ``lam == 0`` falls back to the pseudoinverse
solution ``A_bar^+ y``.

All solvers accept ``y`` either as a vector or as an ``n x k`` matrix of
right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, ConvergenceError, DimensionError, SolveError
from .model import Estimate

PINV_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Full SVD ``A_bar = U diag(s) V^T`` with ``s`` sorted non-increasing."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    @property
    def s_max(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def s_min(self) -> float:
        return float(self.singular_values[-1]) if self.singular_values.size else 0.0

    def reconstruct(self) -> np.ndarray:
        n, p = self.U.shape[0], self.V.shape[0]
        S = np.zeros((n, p))
        k = self.singular_values.size
        S[:k, :k] = np.diag(self.singular_values)
        return self.U @ S @ self.V.T


def _check_system(A_bar: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A_bar = np.asarray(A_bar, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if A_bar.ndim != 2:
        raise DimensionError(f"A_bar must be a matrix, got shape {A_bar.shape}")
    if y.ndim not in (1, 2) or y.shape[0] != A_bar.shape[0]:
        raise DimensionError(f"y of shape {y.shape} does not match A_bar of shape {A_bar.shape}")
    return A_bar, y


def _empty_solution(y: np.ndarray) -> np.ndarray:
    return np.empty((0,) + y.shape[1:])


def resolve_form(n: int, p_bar: int, form: str = "auto") -> str:
    """Pick the Gram shape to factor: ``"auto"`` takes the smaller one."""
    if form == "auto":
        return "primal" if n > p_bar else "dual"
    if form not in ("dual", "primal"):
        raise ConfigError(f"form must be 'auto', 'dual' or 'primal', got {form!r}")
    return form


def gram_matrix(A_bar: np.ndarray, form: str = "auto") -> np.ndarray:
    """``A_bar A_bar^T`` (dual) or ``A_bar^T A_bar`` (primal)."""
    form = resolve_form(*A_bar.shape, form)
    return A_bar @ A_bar.T if form == "dual" else A_bar.T @ A_bar


def ridge_solve(A_bar, y, lam: float, gram: np.ndarray | None = None, form: str = "auto") -> np.ndarray:
    """Ridge estimate through a Cholesky factorization of a shifted Gram matrix.

    ``form="dual"`` solves ``A^T (A A^T + lam I_n)^{-1} y`` and
    ``form="primal"`` solves ``(A^T A + lam I_p)^{-1} A^T y``; ``"auto"``
    factors the smaller of the two, which also keeps the tiny-``lam`` limit
    accurate when the larger Gram matrix is rank deficient. ``gram`` may pass
    the precomputed Gram matrix of the resolved form.
    """
    A_bar, y = _check_system(A_bar, y)
    if not lam > 0:
        raise ConfigError(f"ridge_solve requires lam > 0, got {lam}")
    n, p_bar = A_bar.shape
    if p_bar == 0:
        return _empty_solution(y)
    form = resolve_form(n, p_bar, form)
    K = gram_matrix(A_bar, form) if gram is None else np.asarray(gram, dtype=np.float64)
    k = n if form == "dual" else p_bar
    if K.shape != (k, k):
        raise DimensionError(f"{form} gram must be {k}x{k}, got {K.shape}")
    shifted = K + lam * np.eye(k)
    rhs = y if form == "dual" else A_bar.T @ y
    try:
        factor = scipy.linalg.cho_factor(shifted, lower=True, check_finite=True)
        sol = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolveError(f"shifted Gram matrix is not numerically positive definite (lam={lam})") from exc
    x = A_bar.T @ sol if form == "dual" else sol
    if not np.all(np.isfinite(x)):
        raise SolveError(f"non-finite ridge solution (lam={lam})")
    return x


def svd_factor(A_bar) -> SvdFactors:
    """Full singular value decomposition of ``A_bar``."""
    A_bar = np.asarray(A_bar, dtype=np.float64)
    if A_bar.ndim != 2:
        raise DimensionError(f"A_bar must be a matrix, got shape {A_bar.shape}")
    n, p = A_bar.shape
    if n == 0 or p == 0:
        return SvdFactors(np.eye(n), np.empty(0), np.eye(p))
    try:
        U, s, Vt = np.linalg.svd(A_bar, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("SVD did not converge") from exc
    return SvdFactors(U, s, Vt.T)


def pinv_cutoff(s_max: float, n: int, p_bar: int) -> float:
    """Singular values at or below this are treated as zero."""
    return PINV_RTOL * max(n, p_bar) * s_max


def min_norm_solve(A_bar, y, factors: SvdFactors | None = None) -> np.ndarray:
    """Minimum l2-norm least-squares solution ``A_bar^+ y``."""
    A_bar, y = _check_system(A_bar, y)
    n, p_bar = A_bar.shape
    if p_bar == 0:
        return _empty_solution(y)
    f = svd_factor(A_bar) if factors is None else factors
    s = f.singular_values
    k = int(np.count_nonzero(s > pinv_cutoff(f.s_max, n, p_bar)))
    coef = (f.U[:, :k].T @ y) / (s[:k] if y.ndim == 1 else s[:k, None])
    return f.V[:, :k] @ coef


def solve(A_bar, y, lam: float) -> np.ndarray:
    """Ridge solution for ``lam > 0``; minimum-norm solution for ``lam == 0``."""
    if lam < 0:
        raise ConfigError(f"lam must be >= 0, got {lam}")
    if lam == 0:
        return min_norm_solve(A_bar, y)
    return ridge_solve(A_bar, y, lam)


def extend_estimate(x_bar_hat, p_F: int, p_S: int, p_C: int) -> Estimate:
    """Split ``x_bar_hat`` into fake/included blocks and append a zero missing block."""
    x_bar_hat = np.asarray(x_bar_hat, dtype=np.float64)
    if x_bar_hat.ndim != 1 or x_bar_hat.shape[0] != p_F + p_S:
        raise DimensionError(f"x_bar_hat has shape {x_bar_hat.shape}, expected ({p_F + p_S},)")
    if p_C < 0:
        raise DimensionError(f"p_C must be >= 0, got {p_C}")
    return Estimate(x_bar_hat[:p_F].copy(), x_bar_hat[p_F:].copy(), np.zeros(p_C))


def predict(A_F, A_S, est: Estimate) -> np.ndarray:
    """``A_F x_hat_F + A_S x_hat_S``."""
    A_F = np.asarray(A_F, dtype=np.float64)
    A_S = np.asarray(A_S, dtype=np.float64)
    if A_F.ndim != 2 or A_S.ndim != 2 or A_F.shape[0] != A_S.shape[0]:
        raise DimensionError(f"incompatible feature blocks {A_F.shape} and {A_S.shape}")
    if A_F.shape[1] != est.x_hat_F.shape[0] or A_S.shape[1] != est.x_hat_S.shape[0]:
        raise DimensionError(
            f"feature widths ({A_F.shape[1]}, {A_S.shape[1]}) do not match estimate "
            f"({est.x_hat_F.shape[0]}, {est.x_hat_S.shape[0]})"
        )
    return A_F @ est.x_hat_F + A_S @ est.x_hat_S
