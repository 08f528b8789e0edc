import numpy as np
import pytest

from fakeridge.datagen import SeedSpec, gen_dataset
from fakeridge.errors import DimensionError
from fakeridge.estimator import extend_estimate, solve
from fakeridge.metrics import gen_error_analytic, gen_error_empirical, training_error
from fakeridge.model import Estimate, GroundTruth, ProblemConfig, make_ground_truth
from oracles import jy_full_vector

FIG1 = ProblemConfig(n=200, p_F=0, p_S=100, p_C=100, sigma_v=10.0, P=200.0, r_S=0.9, lam=1.0)


def test_zero_estimate_fig1():
    truth = make_ground_truth(FIG1)
    rep = gen_error_analytic(truth, Estimate(np.empty(0), np.zeros(100), np.zeros(100)), 10.0)
    assert rep.j_y_analytic == pytest.approx(300.0, rel=1e-12)
    assert rep.block_errors == pytest.approx((0.0, 180.0, 20.0), rel=1e-12)


def test_perfect_recovery():
    truth = GroundTruth(np.array([1.0, -2.0]), np.empty(0))
    rep = gen_error_analytic(truth, Estimate(np.zeros(3), truth.x_S.copy()), 0.0)
    assert rep.j_y_analytic == 0.0


def test_fake_energy_adds():
    truth = GroundTruth(np.array([1.0, -2.0]), np.array([0.5]))
    rep = gen_error_analytic(truth, Estimate(np.array([1.0]), truth.x_S.copy(), np.zeros(1)), 2.0)
    assert rep.j_y_analytic == pytest.approx(1.0 + 0.25 + 4.0, rel=1e-15)


def test_analytic_dimension_error():
    truth = GroundTruth(np.ones(2), np.ones(1))
    with pytest.raises(DimensionError):
        gen_error_analytic(truth, Estimate(np.empty(0), np.ones(3), np.zeros(1)), 0.0)


def test_analytic_decomposition_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        pF, pS, pC = rng.integers(0, 6, size=3)
        pC = max(pC, 1)
        truth = GroundTruth(rng.standard_normal(pS), rng.standard_normal(pC))
        est = Estimate(rng.standard_normal(pF), rng.standard_normal(pS), np.zeros(pC))
        s = rng.uniform(0, 3)
        rep = gen_error_analytic(truth, est, s)
        assert rep.decomposition_residual() <= 1e-12
        assert rep.j_y_analytic == pytest.approx(jy_full_vector(truth.x_S, truth.x_C, est.x_hat_F, est.x_hat_S, s), rel=1e-12)
        assert rep.j_y_analytic >= s**2


def test_empirical_exact_for_truth_embedding():
    cfg = ProblemConfig(n=10, p_F=3, p_S=4, p_C=0, sigma_v=0.0, P=5.0, r_S=1.0, lam=0.0)
    truth = make_ground_truth(cfg)
    test = gen_dataset(cfg, truth, 500, SeedSpec(1))
    est = Estimate(np.zeros(3), truth.x_S.copy(), np.empty(0))
    assert gen_error_empirical(test, est) == pytest.approx(0.0, abs=1e-25)


def test_empirical_zero_estimate_concentrates():
    truth = make_ground_truth(FIG1)
    test = gen_dataset(FIG1, truth, 20000, SeedSpec(2))
    mean, se = gen_error_empirical(test, Estimate(np.empty(0), np.zeros(100), np.zeros(100)), with_se=True)
    assert abs(mean - 300.0) <= 3 * se


def test_empirical_matches_analytic():
    cfg = ProblemConfig(n=40, p_F=10, p_S=20, p_C=15, sigma_v=2.0, P=30.0, r_S=0.7, lam=0.5)
    truth = make_ground_truth(cfg)
    hits = 0
    for k in range(20):
        train = gen_dataset(cfg, truth, cfg.n, SeedSpec(3, (k, 0)))
        est = extend_estimate(solve(train.A_bar, train.y, cfg.lam), cfg.p_F, cfg.p_S, cfg.p_C)
        test = gen_dataset(cfg, truth, 20000, SeedSpec(3, (k, 1)))
        mean, se = gen_error_empirical(test, est, with_se=True)
        hits += abs(mean - gen_error_analytic(truth, est, cfg.sigma_v).j_y_analytic) <= 3 * se
    assert hits >= 18


def test_training_error():
    assert training_error([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert training_error([1.0, 0.0], [0.0, 0.0]) == 1.0
    with pytest.raises(DimensionError):
        training_error([1.0], [1.0, 2.0])


def test_training_error_interpolation():
    cfg = ProblemConfig(n=30, p_F=20, p_S=20, p_C=5, sigma_v=1.0, P=10.0, r_S=0.8, lam=0.0)
    ds = gen_dataset(cfg, make_ground_truth(cfg), cfg.n, SeedSpec(4))
    x = solve(ds.A_bar, ds.y, 0.0)
    assert training_error(ds.y, ds.A_bar @ x) <= 1e-16 * float(ds.y @ ds.y)
