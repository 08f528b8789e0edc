"""Command-line entry point: ``fakeridge <command> [flags]``.

Results go to stdout or files; log messages go to stderr.

Exit codes: 0 success, 1 runtime failure, 2 configuration error,
3 a statistical/acceptance check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__
from .bound import BOUND_FIELDS, BoundParams, theorem_bound
from .datagen import SeedSpec
from .errors import ConfigError
from .experiment import coverage_estimate, interpolation_residual, sweep
from .model import make_ground_truth
from .plans import load_config, load_plan, read_toml
from .svgplot import read_sweep_csv, render_svg

log = logging.getLogger("fakeridge")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2, 3


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_sweep(args) -> int:
    plan = load_plan(args.plan, args.seed, args.t1, args.t2)
    cells = len(plan.p_f_list) * len(plan.lambda_grid)
    log.info("sweep: %d cells x %d trials, %d worker(s)", cells, plan.m_features * plan.m_noise, args.workers)
    t0 = time.perf_counter()
    result = sweep(plan, workers=args.workers)
    log.info("sweep finished in %.1f s", time.perf_counter() - t0)
    out = Path(args.out)
    _write_text(out / "sweep.csv", result.to_csv())
    _write_text(out / "plan.json", json.dumps(result.metadata(), indent=2, sort_keys=True) + "\n")
    log.info("wrote %s and %s", out / "sweep.csv", out / "plan.json")
    return EXIT_OK


def cmd_coverage(args) -> int:
    data = read_toml(args.plan)
    cfg = load_config(args.plan, p_fake=args.p_fake, **{"lambda": args.lam})
    t1 = args.t1 if args.t1 is not None else data.get("t1")
    t2 = args.t2 if args.t2 is not None else data.get("t2")
    if t1 is None or t2 is None:
        raise ConfigError("t1 and t2 are required (flags or plan keys)")
    res = coverage_estimate(cfg, BoundParams(float(t1), float(t2)), args.trials, args.seed)
    print(json.dumps(res.to_dict(), indent=2, sort_keys=True))
    if res.vacuous:
        log.info("probability floor %.4g <= 0: the bound asserts nothing (vacuous pass)", res.prob_floor)
    if not res.passed:
        log.error("coverage %.4f below threshold %.4f", res.coverage, res.threshold)
        return EXIT_CHECK
    return EXIT_OK


def cmd_interpolate(args) -> int:
    cfg = load_config(args.plan, p_fake=args.p_fake, **{"lambda": 0.0})
    ratios = [interpolation_residual(cfg, SeedSpec(args.seed, (k,))) for k in range(args.trials)]
    worst = max(ratios)
    ok = worst <= args.rtol
    print(json.dumps({"n": cfg.n, "p_bar": cfg.p_bar, "trials": args.trials, "max_residual_ratio": worst, "rtol": args.rtol, "interpolates": ok}, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_bound_table(args) -> int:
    # deterministic, so no seed is needed
    plan = load_plan(args.plan, 0, args.t1, args.t2)
    if plan.bound_params is None:
        raise ConfigError("t1 and t2 are required (flags or plan keys)")
    lines = [",".join(("p_fake", "lambda") + BOUND_FIELDS)]
    for p_F in plan.p_f_list:
        for lam in plan.lambda_grid:
            if lam == 0:
                continue
            cfg = plan.cell_config(p_F, lam)
            rep = theorem_bound(make_ground_truth(cfg), cfg, plan.bound_params)
            lines.append(",".join([str(p_F), format(lam, ".17g")] + rep.csv_row()))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv}: {exc.strerror}") from None
    svg = render_svg(read_sweep_csv(text, args.value))
    _write_text(Path(args.out), svg)
    log.info("wrote %s", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fakeridge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a (p_F, lambda) Monte Carlo sweep")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True, help="output directory for sweep.csv and plan.json")
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("coverage", help="empirical coverage of the generalization bound")
    p.add_argument("--plan", required=True, help="config file (needs p_fake and lambda unless overridden)")
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--trials", type=_positive_int, default=500)
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--p-fake", dest="p_fake", type=int)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("interpolate", help="check that the min-norm fit interpolates when n < p_bar")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--p-fake", dest="p_fake", type=int)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("bound-table", help="tabulate the bound over a plan's cells (CSV on stdout)")
    p.add_argument("--plan", required=True)
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=float)
    p.set_defaults(func=cmd_bound_table)

    p = sub.add_parser("plot", help="render a sweep CSV as an SVG line chart")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--value", default="jy_analytic_mean", choices=["jy_analytic_mean", "jy_empirical_mean", "train_err_mean"])
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    for name in ("t1", "t2", "lam"):
        value = getattr(args, name, None)
        if value is not None and not math.isfinite(value):
            log.error("config error: --%s must be finite", name.replace("lam", "lambda"))
            return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.error("runtime failure: %s: %s", type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
