"""High-probability upper bound on the generalization error of ridge regression
with fake and missing features, plus the intermediate events behind it.

With ``r_min = min(n, p_bar)``, ``r_max = max(n, p_bar)`` and
``(x)_+ = max(x, 0)`` applied before squaring::

    f_g     = (sqrt(n) + sqrt(p_bar) + t2)^2
              / ((sqrt(r_max) - sqrt(r_min) - t2)_+^2 + lam)^2
    f_g_bar = lam^2 / ((sqrt(n) - sqrt(p_bar) - t2)_+^2 + lam)^2   if n >= p_bar
              1                                                  otherwise

    J_y < ||x_S||^2 f_g_bar
          + (||x_C||^2 + sigma_v^2) f_g (r_min + 2 sqrt(r_min t1) + 2 t1)
          + (||x_C||^2 + sigma_v^2)

holds with probability greater than ``1 - exp(-t1) - 2 exp(-t2^2 / 2)`` over
the training draw, for any ``lam > 0`` and ``t1, t2 >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, DimensionError, LambdaZeroError, NegativeParameterError
from .model import GroundTruth, ProblemConfig

BOUND_FIELDS = (
    "t1",
    "t2",
    "f_g",
    "f_g_bar",
    "term_included",
    "term_missing_noise",
    "term_floor",
    "bound_value",
    "prob_floor",
    "vacuous",
    "r_min",
    "r_max",
)


@dataclass(frozen=True)
class BoundParams:
    t1: float
    t2: float

    def __post_init__(self) -> None:
        for name in ("t1", "t2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise NegativeParameterError(f"{name} must be a finite value >= 0, got {value}")
        object.__setattr__(self, "t1", float(self.t1))
        object.__setattr__(self, "t2", float(self.t2))

    @classmethod
    def for_floor(cls, fail_t1: float, fail_t2: float) -> "BoundParams":
        """Parameters whose two failure terms equal ``fail_t1`` and ``fail_t2``.

        ``for_floor(0.01, 0.01)`` gives a probability floor of 0.98.
        """
        return cls(math.log(1.0 / fail_t1), math.sqrt(2.0 * math.log(2.0 / fail_t2)))


@dataclass(frozen=True)
class BoundReport:
    t1: float
    t2: float
    f_g: float
    f_g_bar: float
    term_included: float
    term_missing_noise: float
    term_floor: float
    bound_value: float
    prob_floor: float
    r_min: int
    r_max: int

    @property
    def vacuous(self) -> bool:
        """True when the probability floor asserts nothing."""
        return self.prob_floor <= 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vacuous"] = self.vacuous
        return {k: d[k] for k in BOUND_FIELDS}

    def csv_row(self) -> list[str]:
        return [_fmt(v) for v in self.to_dict().values()]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _pos(x: float) -> float:
    return max(x, 0.0)


def _require_lambda(lam: float) -> None:
    if lam == 0:
        raise LambdaZeroError("the bound requires a nonzero ridge parameter (lam > 0)")
    if not lam > 0:
        raise NegativeParameterError(f"lam must be > 0, got {lam}")


def f_g(n: int, p_bar: int, lam: float, t2: float) -> float:
    """Noise-amplification factor bounding every ``s_i^2 / (s_i^2 + lam)^2``."""
    _require_lambda(lam)
    r_min, r_max = min(n, p_bar), max(n, p_bar)
    num = (math.sqrt(n) + math.sqrt(p_bar) + t2) ** 2
    gap = _pos(math.sqrt(r_max) - math.sqrt(r_min) - t2)
    return num / (gap**2 + lam) ** 2


def f_g_bar(n: int, p_bar: int, lam: float, t2: float) -> float:
    """Shrinkage factor on the included-feature energy."""
    _require_lambda(lam)
    if n < p_bar:
        return 1.0
    gap = _pos(math.sqrt(n) - math.sqrt(p_bar) - t2)
    return lam**2 / (gap**2 + lam) ** 2


def prob_floor(t1: float, t2: float) -> float:
    """``1 - exp(-t1) - 2 exp(-t2^2 / 2)``; may be negative."""
    if t1 < 0 or t2 < 0:
        raise NegativeParameterError(f"t1 and t2 must be >= 0, got ({t1}, {t2})")
    return 1.0 - math.exp(-t1) - 2.0 * math.exp(-(t2**2) / 2.0)


def omega_z2(truth: GroundTruth, sigma_v: float) -> float:
    """Variance of the effective noise ``A_C x_C + v``."""
    return truth.norm_C2 + float(sigma_v) ** 2


def theorem_bound(truth: GroundTruth, cfg: ProblemConfig, params: BoundParams) -> BoundReport:
    _require_lambda(cfg.lam)
    if truth.x_S.shape[0] != cfg.p_S or truth.x_C.shape[0] != cfg.p_C:
        raise DimensionError("ground truth does not match the config dimensions")
    n, p_bar, t1, t2 = cfg.n, cfg.p_bar, params.t1, params.t2
    r_min = min(n, p_bar)
    fg = f_g(n, p_bar, cfg.lam, t2)
    fgb = f_g_bar(n, p_bar, cfg.lam, t2)
    w2 = omega_z2(truth, cfg.sigma_v)
    term_included = truth.norm_S2 * fgb
    term_missing_noise = w2 * fg * (r_min + 2.0 * math.sqrt(r_min * t1) + 2.0 * t1)
    term_floor = w2
    return BoundReport(
        t1=t1,
        t2=t2,
        f_g=fg,
        f_g_bar=fgb,
        term_included=term_included,
        term_missing_noise=term_missing_noise,
        term_floor=term_floor,
        bound_value=term_included + term_missing_noise + term_floor,
        prob_floor=prob_floor(t1, t2),
        r_min=r_min,
        r_max=max(n, p_bar),
    )


def g_coefficients(singular_values, lam: float) -> np.ndarray:
    """``s_i^2 / (s_i^2 + lam)^2`` for each singular value."""
    _require_lambda(lam)
    s2 = np.square(np.asarray(singular_values, dtype=np.float64))
    return s2 / np.square(s2 + lam)


def chi2_event_check(g, z, omega_z2: float, t1: float) -> bool:
    """Whether ``sum g_i z_i^2`` stays below its chi-squared tail threshold.

    Threshold: ``omega_z2 * (sum g + 2 ||g||_2 sqrt(t1) + 2 max(g) t1)``.
    """
    g = np.asarray(g, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if g.ndim != 1 or g.shape != z.shape:
        raise DimensionError(f"g and z must be vectors of equal length, got {g.shape} and {z.shape}")
    if np.any(g < 0):
        raise ConfigError("g coefficients must be non-negative")
    if t1 < 0:
        raise NegativeParameterError(f"t1 must be >= 0, got {t1}")
    if g.size == 0:
        return False
    lhs = float(g @ np.square(z))
    rhs = omega_z2 * (float(g.sum()) + 2.0 * float(np.linalg.norm(g)) * math.sqrt(t1) + 2.0 * float(g.max()) * t1)
    return lhs < rhs


def singular_event_check(s_min: float, s_max: float, n: int, p_bar: int, t2: float) -> bool:
    """Whether the extreme singular values lie inside their concentration band."""
    if s_min > s_max:
        raise ConfigError(f"s_min ({s_min}) exceeds s_max ({s_max})")
    r_min, r_max = min(n, p_bar), max(n, p_bar)
    lower = math.sqrt(r_max) - math.sqrt(r_min) - t2
    upper = math.sqrt(n) + math.sqrt(p_bar) + t2
    return lower <= s_min and s_max <= upper
