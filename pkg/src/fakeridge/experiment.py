"""Monte Carlo harness: nested feature/noise averaging, bound coverage and
(p_F, lambda) sweeps.

Protocol for one cell ``(p_F, lam)``:

* draw ``m_features`` realizations of the training features ``A_F, A_S, A_C``
  and, for each, one test feature set of ``n_test`` rows;
* for each realization draw ``m_noise`` training/test noise vectors;
* solve, then record the analytic and empirical generalization error and the
  training error of every (realization, noise) pair;
* average over noise draws, then over realizations.

Feature realizations and noise draws are shared across the lambda grid of a
given ``p_F``. Seeds are derived from semantic coordinates only::

    features: (master_seed, (FEATURES, p_F, i, split, block))
    noise:    (master_seed, (NOISE,    p_F, i, j, split, NOISE))

so results never depend on loop order, list order or worker count.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import datagen
from .bound import (
    BoundParams,
    BoundReport,
    chi2_event_check,
    g_coefficients,
    omega_z2,
    singular_event_check,
    theorem_bound,
)
from .datagen import SeedSpec, TEST, TRAIN, gen_dataset, gen_features, gen_noise, gen_response
from .errors import ConfigError, LambdaZeroError
from .estimator import gram_matrix, min_norm_solve, ridge_solve, svd_factor
from .metrics import ErrorReport, squared_residual_stats
from .model import GroundTruth, ProblemConfig, make_ground_truth, validate_config

# Stream domains.
FEATURES = 0
NOISE_DRAWS = 1
COVERAGE_FEATURES = 2
COVERAGE_NOISE = 3

DEFAULT_M = 100
DEFAULT_N_TEST = 20000

CSV_HEADER = (
    "p_fake",
    "lambda",
    "jy_analytic_mean",
    "jy_analytic_std",
    "jy_empirical_mean",
    "train_err_mean",
    "bound_value",
    "prob_floor",
    "coverage",
    "trials",
)


def feature_seed(master_seed: int, p_F: int, i: int, domain: int = FEATURES) -> SeedSpec:
    return SeedSpec(master_seed, (domain, p_F, i))


def noise_seed(master_seed: int, p_F: int, i: int, j: int, domain: int = NOISE_DRAWS) -> SeedSpec:
    return SeedSpec(master_seed, (domain, p_F, i, j))


# ---------------------------------------------------------------------------
# one feature realization, many noise draws and lambdas
# ---------------------------------------------------------------------------


@dataclass
class RealizationResult:
    """Per-(lambda, noise draw) outcomes for one feature realization.

    Arrays have shape ``(len(lambdas), m_noise)``; empirical entries are NaN
    when ``n_test == 0`` and event entries are absent without bound params.
    """

    lambdas: tuple[float, ...]
    jy_analytic: np.ndarray
    err_F: np.ndarray
    err_S: np.ndarray
    err_C: float
    sigma_v2: float
    train_err: np.ndarray
    jy_empirical: np.ndarray
    jy_empirical_se: np.ndarray
    s_min: float | None = None
    s_max: float | None = None
    singular_event: bool | None = None
    chi2_event: np.ndarray | None = None


def simulate_realization(
    cfg: ProblemConfig,
    truth: GroundTruth,
    lambdas: Sequence[float],
    fseed: SeedSpec,
    nseeds: Sequence[SeedSpec],
    n_test: int,
    bound_params: BoundParams | None = None,
) -> RealizationResult:
    """Run every (lambda, noise draw) pair on one draw of the features.

    ``cfg.lam`` is ignored; ``lambdas`` is used instead.
    """
    n = cfg.n
    m = len(nseeds)
    L = len(lambdas)

    train = fseed.child(TRAIN)
    A_F = gen_features(n, cfg.p_F, train.child(datagen.BLOCK_F))
    A_S = gen_features(n, cfg.p_S, train.child(datagen.BLOCK_S))
    A_C = gen_features(n, cfg.p_C, train.child(datagen.BLOCK_C))
    V = np.column_stack([gen_noise(n, cfg.sigma_v, s.child(TRAIN, datagen.NOISE)) for s in nseeds])
    Y = gen_response(A_S, A_C, truth, V)
    A_bar = np.hstack([A_F, A_S])
    gram = gram_matrix(A_bar)

    if n_test > 0:
        test = fseed.child(TEST)
        T_F = gen_features(n_test, cfg.p_F, test.child(datagen.BLOCK_F))
        T_S = gen_features(n_test, cfg.p_S, test.child(datagen.BLOCK_S))
        T_C = gen_features(n_test, cfg.p_C, test.child(datagen.BLOCK_C))
        V_test = np.column_stack([gen_noise(n_test, cfg.sigma_v, s.child(TEST, datagen.NOISE)) for s in nseeds])
        Y_test = gen_response(T_S, T_C, truth, V_test)
        T_bar = np.hstack([T_F, T_S])

    need_svd = any(lam == 0 for lam in lambdas) or bound_params is not None
    factors = svd_factor(A_bar) if need_svd else None

    out = RealizationResult(
        lambdas=tuple(float(lam) for lam in lambdas),
        jy_analytic=np.empty((L, m)),
        err_F=np.empty((L, m)),
        err_S=np.empty((L, m)),
        err_C=truth.norm_C2,
        sigma_v2=float(cfg.sigma_v) ** 2,
        train_err=np.empty((L, m)),
        jy_empirical=np.full((L, m), np.nan),
        jy_empirical_se=np.full((L, m), np.nan),
    )

    if bound_params is not None:
        r_min = min(n, cfg.p_bar)
        s = factors.singular_values[:r_min]
        out.s_min = float(s[-1]) if r_min else 0.0
        out.s_max = float(s[0]) if r_min else 0.0
        out.singular_event = singular_event_check(out.s_min, out.s_max, n, cfg.p_bar, bound_params.t2)
        out.chi2_event = np.zeros((L, m), dtype=bool)
        # effective noise A_C x_C + v in the left singular basis
        Z = factors.U[:, :r_min].T @ (Y - (A_S @ truth.x_S)[:, None])
        w2 = omega_z2(truth, cfg.sigma_v)

    for l, lam in enumerate(lambdas):
        if lam == 0:
            X = min_norm_solve(A_bar, Y, factors=factors)
        else:
            X = ridge_solve(A_bar, Y, lam, gram=gram)
        X_F, X_S = X[: cfg.p_F], X[cfg.p_F :]
        out.err_F[l] = np.einsum("ij,ij->j", X_F, X_F)
        D = truth.x_S[:, None] - X_S
        out.err_S[l] = np.einsum("ij,ij->j", D, D)
        out.jy_analytic[l] = out.err_F[l] + out.err_S[l] + out.err_C + out.sigma_v2
        R = Y - A_bar @ X
        out.train_err[l] = np.einsum("ij,ij->j", R, R)
        if n_test > 0:
            mean, se = squared_residual_stats(Y_test - T_bar @ X)
            out.jy_empirical[l] = mean
            out.jy_empirical_se[l] = se
        if bound_params is not None and lam > 0 and r_min:
            g = g_coefficients(s, lam)
            out.chi2_event[l] = [chi2_event_check(g, Z[:, j], w2, bound_params.t1) for j in range(m)]
    return out


def run_trial(
    cfg: ProblemConfig,
    truth: GroundTruth,
    fseed: SeedSpec,
    nseed: SeedSpec,
    n_test: int,
    bound_params: BoundParams | None = None,
) -> tuple[ErrorReport, dict]:
    """One training draw, one solve, one error report.

    ``n_test == 0`` skips the empirical test error.
    """
    validate_config(cfg)
    res = simulate_realization(cfg, truth, [cfg.lam], fseed, [nseed], n_test, bound_params)
    report = ErrorReport(
        j_y_analytic=float(res.jy_analytic[0, 0]),
        err_F=float(res.err_F[0, 0]),
        err_S=float(res.err_S[0, 0]),
        err_C=res.err_C,
        sigma_v2=res.sigma_v2,
        j_y_empirical=None if n_test == 0 else float(res.jy_empirical[0, 0]),
        j_y_empirical_se=None if n_test == 0 else float(res.jy_empirical_se[0, 0]),
        training_error=float(res.train_err[0, 0]),
    )
    diagnostics: dict = {}
    if bound_params is not None:
        diagnostics = {
            "s_min": res.s_min,
            "s_max": res.s_max,
            "singular_event": res.singular_event,
            "chi2_event": bool(res.chi2_event[0, 0]) if cfg.lam > 0 else None,
        }
    return report, diagnostics


# ---------------------------------------------------------------------------
# cells and sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellResult:
    """Aggregate of ``m_features * m_noise`` trials at one ``(p_F, lam)``."""

    p_F: int
    lam: float
    m_features: int
    m_noise: int
    jy_analytic_mean: float
    jy_analytic_flat_mean: float
    jy_analytic_std: float
    jy_empirical_mean: float | None
    jy_diff_se: float | None
    train_err_mean: float
    bound: BoundReport | None = None
    coverage: float | None = None

    @property
    def trials(self) -> int:
        return self.m_features * self.m_noise

    @property
    def jy_analytic_se(self) -> float:
        """Standard error of the cell mean (realizations are independent)."""
        return self.jy_analytic_std / math.sqrt(self.m_features) if self.m_features > 1 else math.inf

    def csv_row(self) -> list[str]:
        return [
            str(self.p_F),
            _fmt(self.lam),
            _fmt(self.jy_analytic_mean),
            _fmt(self.jy_analytic_std),
            _fmt(self.jy_empirical_mean),
            _fmt(self.train_err_mean),
            _fmt(None if self.bound is None else self.bound.bound_value),
            _fmt(None if self.bound is None else self.bound.prob_floor),
            _fmt(self.coverage),
            str(self.trials),
        ]


def _fmt(v: float | None) -> str:
    return "" if v is None else format(float(v), ".17g")


def _nested_mean(a: np.ndarray) -> float:
    # inner mean over noise draws (axis 1), outer over realizations
    return float(a.mean(axis=1).mean())


def aggregate_cell(
    p_F: int,
    lam: float,
    per_realization: Sequence[RealizationResult],
    index: int,
    bound: BoundReport | None,
) -> CellResult:
    """Reduce the ``index``-th lambda column of each realization, in order."""
    jy = np.stack([r.jy_analytic[index] for r in per_realization])
    train = np.stack([r.train_err[index] for r in per_realization])
    emp = np.stack([r.jy_empirical[index] for r in per_realization])
    m_features, m_noise = jy.shape
    realization_means = jy.mean(axis=1)
    std = float(realization_means.std(ddof=1)) if m_features > 1 else 0.0
    if np.all(np.isnan(emp)):
        emp_mean = diff_se = None
    else:
        emp_mean = _nested_mean(emp)
        diffs = (emp - jy).mean(axis=1)
        diff_se = float(diffs.std(ddof=1) / math.sqrt(m_features)) if m_features > 1 else math.inf
    coverage = None
    if bound is not None:
        coverage = float(np.mean(jy < bound.bound_value))
    return CellResult(
        p_F=p_F,
        lam=float(lam),
        m_features=m_features,
        m_noise=m_noise,
        jy_analytic_mean=_nested_mean(jy),
        jy_analytic_flat_mean=float(jy.mean()),
        jy_analytic_std=std,
        jy_empirical_mean=emp_mean,
        jy_diff_se=diff_se,
        train_err_mean=_nested_mean(train),
        bound=bound,
        coverage=coverage,
    )


def _realization_task(args) -> RealizationResult:
    cfg, truth, lambdas, fseed, nseeds, n_test, params = args
    return simulate_realization(cfg, truth, lambdas, fseed, nseeds, n_test, params)


def _map(tasks: list, workers: int) -> list[RealizationResult]:
    if workers <= 1 or len(tasks) <= 1:
        return [_realization_task(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order regardless of completion order
        return list(pool.map(_realization_task, tasks))


def _realization_tasks(cfg, truth, lambdas, p_F, m_features, m_noise, n_test, master_seed, params):
    return [
        (
            cfg,
            truth,
            tuple(lambdas),
            feature_seed(master_seed, p_F, i),
            [noise_seed(master_seed, p_F, i, j) for j in range(m_noise)],
            n_test,
            params,
        )
        for i in range(m_features)
    ]


def _cell_bound(cfg: ProblemConfig, truth: GroundTruth, params: BoundParams | None) -> BoundReport | None:
    if params is None or cfg.lam == 0:
        return None
    return theorem_bound(truth, cfg, params)


def run_monte_carlo(
    cfg: ProblemConfig,
    m_features: int,
    m_noise: int,
    n_test: int,
    master_seed: int,
    bound_params: BoundParams | None = None,
    workers: int = 1,
) -> CellResult:
    """Nested Monte Carlo average at ``(cfg.p_F, cfg.lam)``."""
    validate_config(cfg)
    if m_features < 1 or m_noise < 1:
        raise ConfigError("m_features and m_noise must be >= 1")
    truth = make_ground_truth(cfg)
    tasks = _realization_tasks(cfg, truth, [cfg.lam], cfg.p_F, m_features, m_noise, n_test, master_seed, bound_params)
    results = _map(tasks, workers)
    return aggregate_cell(cfg.p_F, cfg.lam, results, 0, _cell_bound(cfg, truth, bound_params))


@dataclass(frozen=True)
class ExperimentPlan:
    base: ProblemConfig
    lambda_grid: tuple[float, ...]
    p_f_list: tuple[int, ...]
    master_seed: int
    m_features: int = DEFAULT_M
    m_noise: int = DEFAULT_M
    n_test: int = DEFAULT_N_TEST
    bound_params: BoundParams | None = None

    def __post_init__(self) -> None:
        grid = tuple(float(x) for x in self.lambda_grid)
        pfs = tuple(int(x) for x in self.p_f_list)
        object.__setattr__(self, "lambda_grid", grid)
        object.__setattr__(self, "p_f_list", pfs)
        if not grid:
            raise ConfigError("lambda_grid must not be empty")
        if any(not math.isfinite(x) or x < 0 for x in grid):
            raise ConfigError("lambda_grid entries must be finite and >= 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("lambda_grid must be sorted ascending without duplicates")
        if not pfs:
            raise ConfigError("p_f_list must not be empty")
        if any(x < 0 for x in pfs):
            raise ConfigError("p_f_list entries must be >= 0")
        if len(set(pfs)) != len(pfs):
            raise ConfigError("p_f_list must not contain duplicates")
        if self.m_features < 1:
            raise ConfigError("m_features must be >= 1")
        if self.m_noise < 1:
            raise ConfigError("m_noise must be >= 1")
        if self.n_test < 0:
            raise ConfigError("n_test must be >= 0")
        SeedSpec(self.master_seed)
        for p_F in pfs:
            for lam in grid:
                self.cell_config(p_F, lam)

    def cell_config(self, p_F: int, lam: float) -> ProblemConfig:
        return self.base.replace(p_F=p_F, lam=lam)

    def to_mapping(self) -> dict:
        d = self.base.to_mapping()
        d.pop("p_fake")
        d.pop("lambda")
        d.update(
            lambda_grid=list(self.lambda_grid),
            p_f_list=list(self.p_f_list),
            m_features=self.m_features,
            m_noise=self.m_noise,
            n_test=self.n_test,
            master_seed=self.master_seed,
        )
        if self.bound_params is not None:
            d.update(t1=self.bound_params.t1, t2=self.bound_params.t2)
        return d


@dataclass(frozen=True)
class SweepResult:
    plan: ExperimentPlan
    rows: tuple[CellResult, ...] = field(default_factory=tuple)

    def row(self, p_F: int, lam: float) -> CellResult:
        for r in self.rows:
            if r.p_F == p_F and r.lam == lam:
                return r
        raise KeyError((p_F, lam))

    def to_csv(self) -> str:
        lines = [",".join(CSV_HEADER)]
        lines.extend(",".join(r.csv_row()) for r in self.rows)
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        from .metrics import EMPIRICAL_NORMALIZATION

        return {
            "plan": self.plan.to_mapping(),
            "master_seed": self.plan.master_seed,
            "jy_empirical_normalization": EMPIRICAL_NORMALIZATION,
            "jy_analytic_std": "standard deviation of per-realization means (ddof=1)",
            "trials_per_cell": self.plan.m_features * self.plan.m_noise,
        }


def sweep(plan: ExperimentPlan, workers: int = 1) -> SweepResult:
    """Run every ``(p_F, lam)`` cell of ``plan``.

    Each realization task covers the whole lambda grid for one ``p_F``; the
    reduction runs sequentially over the index-ordered results.
    """
    tasks = []
    cfgs = {}
    for p_F in plan.p_f_list:
        cfg = plan.cell_config(p_F, plan.lambda_grid[0])
        truth = make_ground_truth(cfg)
        cfgs[p_F] = (cfg, truth)
        tasks.extend(
            _realization_tasks(
                cfg, truth, plan.lambda_grid, p_F, plan.m_features, plan.m_noise, plan.n_test,
                plan.master_seed, plan.bound_params,
            )
        )
    results = _map(tasks, workers)

    rows = []
    for k, p_F in enumerate(plan.p_f_list):
        chunk = results[k * plan.m_features : (k + 1) * plan.m_features]
        _, truth = cfgs[p_F]
        for idx, lam in enumerate(plan.lambda_grid):
            cell_cfg = plan.cell_config(p_F, lam)
            rows.append(aggregate_cell(p_F, lam, chunk, idx, _cell_bound(cell_cfg, truth, plan.bound_params)))
    return SweepResult(plan, tuple(rows))


# ---------------------------------------------------------------------------
# bound coverage
# ---------------------------------------------------------------------------


def binomial_slack(floor: float, trials: int, n_se: float = 3.0) -> float:
    if floor <= 0 or floor >= 1:
        return 0.0
    return n_se * math.sqrt(floor * (1.0 - floor) / trials)


@dataclass(frozen=True)
class CoverageResult:
    coverage: float
    prob_floor: float
    bound: BoundReport
    trials: int
    jy_mean: float
    jy_max: float

    @property
    def vacuous(self) -> bool:
        return self.prob_floor <= 0

    @property
    def threshold(self) -> float:
        return self.prob_floor - binomial_slack(self.prob_floor, self.trials)

    @property
    def passed(self) -> bool:
        return self.vacuous or self.coverage >= self.threshold

    def to_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "prob_floor": self.prob_floor,
            "threshold": self.threshold,
            "vacuous": self.vacuous,
            "passed": self.passed,
            "bound_value": self.bound.bound_value,
            "trials": self.trials,
            "jy_mean": self.jy_mean,
            "jy_max": self.jy_max,
            "bound": self.bound.to_dict(),
        }


def coverage_jy(cfg: ProblemConfig, trials: int, master_seed: int) -> np.ndarray:
    """Analytic ``J_y`` over ``trials`` independent training draws."""
    truth = make_ground_truth(cfg)
    out = np.empty(trials)
    for t in range(trials):
        res = simulate_realization(
            cfg,
            truth,
            [cfg.lam],
            feature_seed(master_seed, cfg.p_F, t, COVERAGE_FEATURES),
            [noise_seed(master_seed, cfg.p_F, t, 0, COVERAGE_NOISE)],
            0,
        )
        out[t] = res.jy_analytic[0, 0]
    return out


def coverage_estimate(cfg: ProblemConfig, params: BoundParams, trials: int, master_seed: int) -> CoverageResult:
    """Fraction of independent trials whose ``J_y`` falls below the bound."""
    validate_config(cfg)
    if cfg.lam == 0:
        raise LambdaZeroError("coverage requires lam > 0: the bound only holds for a nonzero ridge parameter")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    bound = theorem_bound(make_ground_truth(cfg), cfg, params)
    jy = coverage_jy(cfg, trials, master_seed)
    return CoverageResult(
        coverage=float(np.mean(jy < bound.bound_value)),
        prob_floor=bound.prob_floor,
        bound=bound,
        trials=trials,
        jy_mean=float(jy.mean()),
        jy_max=float(jy.max()),
    )


# ---------------------------------------------------------------------------
# interpolation
# ---------------------------------------------------------------------------


def interpolation_residual(cfg: ProblemConfig, seed: SeedSpec | int) -> float:
    """``||y - A_bar x_bar_hat|| / ||y||`` for the minimum-norm solution."""
    validate_config(cfg)
    if cfg.n >= cfg.p_bar:
        raise ConfigError(f"interpolation needs n < p_bar, got n={cfg.n}, p_bar={cfg.p_bar}")
    if cfg.lam != 0:
        raise ConfigError(f"interpolation is checked for lam = 0, got {cfg.lam}")
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(seed)
    ds = gen_dataset(cfg, make_ground_truth(cfg), cfg.n, seed)
    A_bar = ds.A_bar
    x = min_norm_solve(A_bar, ds.y)
    return float(np.linalg.norm(ds.y - A_bar @ x) / np.linalg.norm(ds.y))


def interpolation_check(cfg: ProblemConfig, seed: SeedSpec | int, rtol: float = 1e-8) -> bool:
    return interpolation_residual(cfg, seed) <= rtol


def log_grid(lo: float, hi: float, num: int) -> tuple[float, ...]:
    """Log-spaced lambda grid with exact endpoints."""
    grid = np.logspace(math.log10(lo), math.log10(hi), num)
    grid[0], grid[-1] = lo, hi
    return tuple(float(x) for x in grid)


def iter_cells(plan: ExperimentPlan) -> Iterable[tuple[int, float]]:
    for p_F in plan.p_f_list:
        for lam in plan.lambda_grid:
            yield p_F, lam
