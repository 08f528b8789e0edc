"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line (also collected in the pytest terminal
summary under "acceptance criteria").
"""

import csv
import io
import math
import time
from pathlib import Path

import numpy as np
import pytest

from fakeridge.bound import BoundParams, chi2_event_check, g_coefficients, singular_event_check
from fakeridge.cli import main
from fakeridge.datagen import SeedSpec, gen_dataset
from fakeridge.estimator import extend_estimate, min_norm_solve, ridge_solve, solve
from fakeridge.experiment import coverage_estimate, interpolation_residual
from fakeridge.metrics import gen_error_analytic, gen_error_empirical
from fakeridge.model import ProblemConfig, make_ground_truth
from oracles import binomial_lower, jy_full_vector, ridge_primal

FIG1_PLAN = Path(__file__).parents[1] / "figures" / "fig1.plan"
SEED = 20220101
T1_98 = math.log(100)
T2_98 = math.sqrt(2 * math.log(200))


@pytest.fixture(scope="module")
def fig1_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("fig1")
    t0 = time.perf_counter()
    code = main(["sweep", "--plan", str(FIG1_PLAN), "--out", str(root / "w1"), "--seed", str(SEED), "--workers", "1"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    code = main(["sweep", "--plan", str(FIG1_PLAN), "--out", str(root / "w2"), "--seed", str(SEED), "--workers", "2"])
    assert code == 0
    code = main(["sweep", "--plan", str(FIG1_PLAN), "--out", str(root / "w1b"), "--seed", str(SEED), "--workers", "1"])
    assert code == 0
    return root, elapsed


def _cell_means(path):
    means = {}
    for row in csv.DictReader(io.StringIO(path.read_text())):
        means[(int(row["p_fake"]), float(row["lambda"]))] = float(row["jy_analytic_mean"])
    return means


def test_c1_figure1_orderings(fig1_runs, acceptance_report):
    root, elapsed = fig1_runs
    means = _cell_means(root / "w1" / "sweep.csv")
    lams = sorted({lam for _, lam in means})
    assert len(lams) == 12 and lams[0] <= 1e-3 and lams[-1] >= 1e3
    a = all(means[(0, lam)] == min(means[(p, lam)] for p in (0, 100, 300, 500)) for lam in lams)
    lo, hi = lams[0], lams[-1]
    b = means[(100, lo)] > means[(300, lo)] and means[(100, lo)] > means[(500, lo)]
    c = means[(100, hi)] < means[(300, hi)] and means[(100, hi)] < means[(500, hi)]
    fast = elapsed < 300
    ok = a and b and c and fast
    acceptance_report(
        "C1 fake-feature sweep orderings",
        ok,
        f"(a) p_F=0 lowest at all lambda: {a}; (b) small lambda 100>300,500: {b} "
        f"[{means[(100, lo)]:.4g} vs {means[(300, lo)]:.4g}, {means[(500, lo)]:.4g}]; "
        f"(c) large lambda 100<300,500: {c} [{means[(100, hi)]:.4g} vs {means[(300, hi)]:.4g}, {means[(500, hi)]:.4g}]; "
        f"runtime {elapsed:.1f}s < 300s",
    )
    assert ok


COVERAGE_CONFIGS = [
    ProblemConfig(n=200, p_F=100, p_S=100, p_C=100, sigma_v=10.0, P=200.0, r_S=0.9, lam=1.0),
    ProblemConfig(n=300, p_F=0, p_S=100, p_C=50, sigma_v=10.0, P=200.0, r_S=0.9, lam=10.0),
    ProblemConfig(n=100, p_F=300, p_S=50, p_C=50, sigma_v=10.0, P=200.0, r_S=0.9, lam=0.1),
]


def test_c2_theorem_coverage(acceptance_report):
    params = BoundParams(T1_98, T2_98)
    t0 = time.perf_counter()
    results = [coverage_estimate(cfg, params, 500, SEED + k) for k, cfg in enumerate(COVERAGE_CONFIGS)]
    elapsed = time.perf_counter() - t0
    threshold = binomial_lower(0.98, 500)
    assert threshold >= 0.96
    covs = [r.coverage for r in results]
    ok = all(c >= threshold for c in covs) and all(abs(r.prob_floor - 0.98) < 1e-12 for r in results) and elapsed < 120
    acceptance_report("C2 bound coverage", ok, f"coverage {covs} >= {threshold:.4f}; runtime {elapsed:.1f}s < 120s")
    assert ok


def _random_shape(rng, over):
    n = int(rng.integers(10, 60))
    gap = int(rng.integers(5, 40))
    return (n, n + gap) if over else (n + gap, n)


def test_c3_estimator_identities(acceptance_report):
    rng = np.random.default_rng(SEED)
    worst_forms = worst_limit = 0.0
    for k in range(50):
        A = rng.standard_normal(_random_shape(rng, over=k % 2 == 0))
        y = rng.standard_normal(A.shape[0])
        for lam in (1e-3, 1.0, 1e3):
            ref = ridge_primal(A, y, lam)
            dual = ridge_solve(A, y, lam, form="dual")
            primal = ridge_solve(A, y, lam, form="primal")
            scale = np.linalg.norm(ref)
            worst_forms = max(
                worst_forms,
                np.linalg.norm(dual - primal) / scale,
                np.linalg.norm(dual - ref) / scale,
                np.linalg.norm(primal - ref) / scale,
            )
        x0 = min_norm_solve(A, y)
        worst_limit = max(worst_limit, np.linalg.norm(ridge_solve(A, y, 1e-10) - x0) / np.linalg.norm(x0))
    ok = worst_forms <= 1e-8 and worst_limit <= 1e-5
    acceptance_report("C3 estimator identities", ok, f"dual/primal max rel diff {worst_forms:.2e} <= 1e-8; lambda=1e-10 vs min-norm {worst_limit:.2e} <= 1e-5")
    assert ok


def test_c4_interpolation(acceptance_report):
    cfgs = [
        ProblemConfig(n=50, p_F=100, p_S=0, p_C=100, sigma_v=10.0, P=200.0, r_S=0.0, lam=0.0),
        ProblemConfig(n=50, p_F=60, p_S=20, p_C=20, sigma_v=10.0, P=200.0, r_S=0.9, lam=0.0),
    ]
    worst = max(interpolation_residual(cfg, SeedSpec(SEED, (k, s))) for k, cfg in enumerate(cfgs) for s in range(20))
    ok = worst <= 1e-8
    acceptance_report("C4 interpolation", ok, f"max ||y - A x||/||y|| = {worst:.2e} <= 1e-8 over 2 configs x 20 seeds")
    assert ok


def test_c5_error_decomposition(acceptance_report):
    rng = np.random.default_rng(SEED + 5)
    worst_decomp = 0.0
    agree = 0
    for k in range(100):
        cfg = ProblemConfig(
            n=int(rng.integers(10, 80)),
            p_F=int(rng.integers(0, 40)),
            p_S=int(rng.integers(1, 30)),
            p_C=int(rng.integers(1, 30)),
            sigma_v=float(rng.uniform(0, 5)),
            P=float(rng.uniform(1, 50)),
            r_S=float(rng.uniform(0, 1)),
            lam=float(rng.choice([0.0, 1e-2, 1.0, 10.0])),
        )
        truth = make_ground_truth(cfg)
        seed = SeedSpec(SEED, (5, k))
        train = gen_dataset(cfg, truth, cfg.n, seed.child(0))
        est = extend_estimate(solve(train.A_bar, train.y, cfg.lam), cfg.p_F, cfg.p_S, cfg.p_C)
        rep = gen_error_analytic(truth, est, cfg.sigma_v)
        ref = jy_full_vector(truth.x_S, truth.x_C, est.x_hat_F, est.x_hat_S, cfg.sigma_v)
        worst_decomp = max(worst_decomp, abs(rep.j_y_analytic - ref) / ref)
        mean, se = gen_error_empirical(gen_dataset(cfg, truth, 20000, seed.child(1)), est, with_se=True)
        agree += abs(mean - rep.j_y_analytic) <= 3 * se
    ok = worst_decomp <= 1e-12 and agree >= 95
    acceptance_report(
        "C5 error decomposition",
        ok,
        f"blockwise vs stacked-vector max rel error {worst_decomp:.1e} <= 1e-12; empirical within 3 SE on {agree}/100 >= 95",
    )
    assert ok


def test_c6_proof_event_frequencies(acceptance_report):
    rng = np.random.default_rng(SEED + 6)
    draws = 1000
    # chi-squared event with g from a Gaussian design, t1 = 1
    s = np.linalg.svd(rng.standard_normal((100, 150)), compute_uv=False)
    g = g_coefficients(s, 1.0)
    w2 = 120.0
    chi2_hits = sum(chi2_event_check(g, rng.normal(0.0, math.sqrt(w2), g.size), w2, 1.0) for _ in range(draws))
    chi2_floor = 1 - math.exp(-1.0)
    # singular-value band, t2 = 2, 100 x 400 Gaussian matrices
    sv_hits = 0
    for _ in range(draws):
        sv = np.linalg.svd(rng.standard_normal((100, 400)), compute_uv=False)
        sv_hits += singular_event_check(sv[-1], sv[0], 100, 400, 2.0)
    sv_floor = 1 - 2 * math.exp(-2.0)
    ok1 = chi2_hits / draws >= binomial_lower(chi2_floor, draws)
    ok2 = sv_hits / draws >= binomial_lower(sv_floor, draws)
    acceptance_report(
        "C6 proof event frequencies",
        ok1 and ok2,
        f"chi2 {chi2_hits / draws:.3f} >= {binomial_lower(chi2_floor, draws):.3f}; "
        f"singular {sv_hits / draws:.3f} >= {binomial_lower(sv_floor, draws):.3f}",
    )
    assert ok1 and ok2


def test_c7_g_coefficient_bound(acceptance_report):
    rng = np.random.default_rng(SEED + 7)
    violations = 0
    for _ in range(50):
        n, p = int(rng.integers(5, 80)), int(rng.integers(5, 80))
        lam = float(10 ** rng.uniform(-4, 4))
        s = np.linalg.svd(rng.standard_normal((n, p)), compute_uv=False)[: min(n, p)]
        g = g_coefficients(s, lam)
        violations += int(np.sum(g > s.max() ** 2 / (s.min() ** 2 + lam) ** 2))
    ok = violations == 0
    acceptance_report("C7 g-coefficient bound", ok, f"{violations} violations over 50 instances (exact comparison)")
    assert ok


def test_c8_determinism(fig1_runs, acceptance_report):
    root, _ = fig1_runs
    w1 = (root / "w1" / "sweep.csv").read_bytes()
    ok = w1 == (root / "w2" / "sweep.csv").read_bytes() == (root / "w1b" / "sweep.csv").read_bytes()
    acceptance_report("C8 determinism", ok, "sweep.csv byte-identical for --workers 1, --workers 2 and a rerun")
    assert ok
