"""Problem configuration and the domain types shared across the package.

Notation follows the fake/missing-feature setup:

* ``A_S`` -- features used both by the data and by the model ("included"),
* ``A_C`` -- features that generate the data but are absent from the model
  ("missing"),
* ``A_F`` -- features the model uses but the data never depends on ("fake").

Derived widths are ``p_tilde = p_S + p_C`` (data side), ``p_bar = p_F + p_S``
(model side) and ``p = p_F + p_S + p_C``. Empty blocks are zero-width arrays.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import ConfigError, DimensionError, NegativeParameterError, PowerError

# Key names used by config/plan files.
CONFIG_KEYS = {
    "n": "n",
    "p_fake": "p_F",
    "p_included": "p_S",
    "p_missing": "p_C",
    "sigma_v": "sigma_v",
    "power": "P",
    "r_s": "r_S",
    "lambda": "lam",
}

_INT_FIELDS = ("n", "p_F", "p_S", "p_C")
_REAL_FIELDS = ("sigma_v", "P", "r_S", "lam")


@dataclass(frozen=True)
class ProblemConfig:
    """Dimensions, signal/noise levels and ridge parameter of one problem.

    ``lam`` is the ridge parameter; ``lam == 0`` selects the minimum-norm
    solution.
    """

    n: int
    p_F: int
    p_S: int
    p_C: int
    sigma_v: float
    P: float
    r_S: float
    lam: float

    def __post_init__(self) -> None:
        _check_config(self)

    @property
    def p_tilde(self) -> int:
        return self.p_S + self.p_C

    @property
    def p_bar(self) -> int:
        return self.p_F + self.p_S

    @property
    def p(self) -> int:
        return self.p_F + self.p_S + self.p_C

    @property
    def r_min(self) -> int:
        return min(self.n, self.p_bar)

    @property
    def r_max(self) -> int:
        return max(self.n, self.p_bar)

    def replace(self, **changes: Any) -> "ProblemConfig":
        """Return a validated copy with some fields changed."""
        values = {f: getattr(self, f) for f in _INT_FIELDS + _REAL_FIELDS}
        values.update(changes)
        return ProblemConfig(**values)

    def to_mapping(self) -> dict[str, Any]:
        """Serialize using the file key names."""
        return {key: getattr(self, attr) for key, attr in CONFIG_KEYS.items()}

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ProblemConfig":
        """Build a config from a mapping keyed by the file key names.

        Keys outside the config key set are ignored so that plan files can
        carry extra plan-level entries.
        """
        missing = [key for key in CONFIG_KEYS if key not in data]
        if missing:
            raise ConfigError(f"missing config key(s): {', '.join(missing)}")
        kwargs: dict[str, Any] = {}
        for key, attr in CONFIG_KEYS.items():
            value = data[key]
            if attr in _INT_FIELDS:
                kwargs[attr] = _as_int(key, value)
            else:
                kwargs[attr] = _as_real(key, value)
        return cls(**kwargs)


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real) and float(value).is_integer():
        return int(value)
    raise ConfigError(f"{name}: expected an integer, got {value!r}")


def _as_real(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name}: expected a real number, got {value!r}")
    return float(value)


def _check_config(cfg: ProblemConfig) -> None:
    for name in _INT_FIELDS:
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise DimensionError(f"{name} must be an integer, got {value!r}")
        if value < 0:
            raise DimensionError(f"{name} must be >= 0, got {value}")
    if cfg.n < 1:
        raise DimensionError(f"n must be >= 1, got {cfg.n}")
    if cfg.p_S + cfg.p_C < 1:
        raise DimensionError("p_S + p_C must be >= 1 (the data needs at least one feature)")

    for name in _REAL_FIELDS:
        value = getattr(cfg, name)
        if not isinstance(value, numbers.Real) or not math.isfinite(value):
            raise NegativeParameterError(f"{name} must be a finite real, got {value!r}")
        if value < 0:
            raise NegativeParameterError(f"{name} must be >= 0, got {value}")
    if cfg.r_S > 1:
        raise PowerError(f"r_S must lie in [0, 1], got {cfg.r_S}")
    if cfg.p_C == 0 and cfg.r_S != 1:
        raise PowerError(f"p_C = 0 requires r_S = 1, got r_S = {cfg.r_S}")
    if cfg.p_S == 0 and cfg.r_S != 0:
        raise PowerError(f"p_S = 0 requires r_S = 0, got r_S = {cfg.r_S}")


def validate_config(cfg: ProblemConfig) -> ProblemConfig:
    """Return ``cfg`` unchanged if every invariant holds, otherwise raise."""
    _check_config(cfg)
    return cfg


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """The unknown coefficients ``x_S`` (included) and ``x_C`` (missing)."""

    x_S: np.ndarray
    x_C: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_S", _frozen(self.x_S))
        object.__setattr__(self, "x_C", _frozen(self.x_C))
        if self.x_S.ndim != 1 or self.x_C.ndim != 1:
            raise DimensionError("x_S and x_C must be vectors")

    @property
    def x_tilde(self) -> np.ndarray:
        return np.concatenate([self.x_S, self.x_C])

    @property
    def norm_S2(self) -> float:
        return float(self.x_S @ self.x_S)

    @property
    def norm_C2(self) -> float:
        return float(self.x_C @ self.x_C)


def make_ground_truth(cfg: ProblemConfig) -> GroundTruth:
    """Constant-vector ground truth splitting power ``P`` by ratio ``r_S``.

    Every entry of ``x_S`` equals ``sqrt(r_S * P / p_S)`` and every entry of
    ``x_C`` equals ``sqrt((1 - r_S) * P / p_C)``.
    """
    validate_config(cfg)
    x_S = np.full(cfg.p_S, math.sqrt(cfg.r_S * cfg.P / cfg.p_S)) if cfg.p_S else np.empty(0)
    x_C = np.full(cfg.p_C, math.sqrt((1.0 - cfg.r_S) * cfg.P / cfg.p_C)) if cfg.p_C else np.empty(0)
    return GroundTruth(x_S, x_C)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature blocks, noise and response for one training or test set."""

    A_F: np.ndarray
    A_S: np.ndarray
    A_C: np.ndarray
    v: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        for name in ("A_F", "A_S", "A_C", "v", "y"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        rows = {self.A_F.shape[0], self.A_S.shape[0], self.A_C.shape[0], self.v.shape[0], self.y.shape[0]}
        if len(rows) != 1:
            raise DimensionError(f"dataset blocks disagree on row count: {sorted(rows)}")

    @property
    def rows(self) -> int:
        return self.y.shape[0]

    @property
    def A_bar(self) -> np.ndarray:
        """Model-side features ``[A_F, A_S]``."""
        return np.hstack([self.A_F, self.A_S])

    @property
    def A_tilde(self) -> np.ndarray:
        """Data-side features ``[A_S, A_C]``."""
        return np.hstack([self.A_S, self.A_C])

    @property
    def A(self) -> np.ndarray:
        return np.hstack([self.A_F, self.A_S, self.A_C])


@dataclass(frozen=True, eq=False)
class Estimate:
    """Solved coefficients, zero-extended over the missing block."""

    x_hat_F: np.ndarray
    x_hat_S: np.ndarray
    x_hat_C: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self) -> None:
        for name in ("x_hat_F", "x_hat_S", "x_hat_C"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.x_hat_C != 0):
            raise DimensionError("x_hat_C must be identically zero")

    @property
    def x_bar_hat(self) -> np.ndarray:
        return np.concatenate([self.x_hat_F, self.x_hat_S])

    @property
    def x_hat(self) -> np.ndarray:
        return np.concatenate([self.x_hat_F, self.x_hat_S, self.x_hat_C])
