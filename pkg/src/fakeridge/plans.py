"""Reading problem configs and experiment plans from TOML files.

Config keys: ``n, p_fake, p_included, p_missing, sigma_v, power, r_s,
lambda``. Plan files add ``lambda_grid``, ``p_f_list``, ``m_features``,
``m_noise``, ``n_test`` and optionally ``t1``/``t2``. ``lambda_grid`` is
either an explicit list or a table ``{min, max, num}`` expanded to a
log-spaced grid. A plan file needs neither ``p_fake`` nor ``lambda``.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bound import BoundParams
from .errors import ConfigError
from .experiment import DEFAULT_M, DEFAULT_N_TEST, ExperimentPlan, log_grid
from .model import ProblemConfig


def read_toml(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _lambda_grid(raw: Any) -> tuple[float, ...]:
    if isinstance(raw, dict):
        try:
            return log_grid(float(raw["min"]), float(raw["max"]), int(raw["num"]))
        except KeyError as exc:
            raise ConfigError(f"lambda_grid: missing key {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"lambda_grid: {exc}") from None
    if not isinstance(raw, list):
        raise ConfigError("lambda_grid: expected a list or a {min, max, num} table")
    try:
        return tuple(float(x) for x in raw)
    except (TypeError, ValueError):
        raise ConfigError(f"lambda_grid: non-numeric entry in {raw!r}") from None


def _bound_params(data: dict, t1: float | None, t2: float | None) -> BoundParams | None:
    t1 = data.get("t1") if t1 is None else t1
    t2 = data.get("t2") if t2 is None else t2
    if t1 is None and t2 is None:
        return None
    if t1 is None or t2 is None:
        raise ConfigError("t1 and t2 must be given together")
    return BoundParams(float(t1), float(t2))


def config_from_mapping(data: dict, **overrides: Any) -> ProblemConfig:
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    return ProblemConfig.from_mapping(merged)


def plan_from_mapping(
    data: dict,
    master_seed: int,
    t1: float | None = None,
    t2: float | None = None,
) -> ExperimentPlan:
    for key in ("lambda_grid", "p_f_list"):
        if key not in data:
            raise ConfigError(f"missing plan key: {key}")
    grid = _lambda_grid(data["lambda_grid"])
    if not grid:
        raise ConfigError("lambda_grid: must not be empty")
    p_f_list = data["p_f_list"]
    if not isinstance(p_f_list, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in p_f_list):
        raise ConfigError("p_f_list: expected a list of integers")
    if not p_f_list:
        raise ConfigError("p_f_list: must not be empty")
    # the base config takes the first cell's p_F and lambda; cells override them
    base = config_from_mapping(data, p_fake=p_f_list[0], **{"lambda": grid[0]})
    return ExperimentPlan(
        base=base,
        lambda_grid=grid,
        p_f_list=tuple(p_f_list),
        master_seed=master_seed,
        m_features=int(data.get("m_features", DEFAULT_M)),
        m_noise=int(data.get("m_noise", DEFAULT_M)),
        n_test=int(data.get("n_test", DEFAULT_N_TEST)),
        bound_params=_bound_params(data, t1, t2),
    )


def load_plan(path: str | Path, master_seed: int, t1: float | None = None, t2: float | None = None) -> ExperimentPlan:
    return plan_from_mapping(read_toml(path), master_seed, t1, t2)


def load_config(path: str | Path, **overrides: Any) -> ProblemConfig:
    return config_from_mapping(read_toml(path), **overrides)
