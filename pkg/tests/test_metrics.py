import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from locverify import scenario as sc
from locverify.channel import ChannelParams, Dataset, generate_dataset
from locverify.errors import DimensionError, EmptyInputError, InvalidParameterError
from locverify.lrt import LrtDetector
from locverify.metrics import (
    EMPIRICAL,
    analytic_lrt_error,
    binomial_se,
    compute_metrics,
    q_function,
    roc_sweep,
)


def _decisions_with_rates(alpha, beta, n=10):
    labels = [0] * n + [1] * n
    decisions = [1] * int(alpha * n) + [0] * (n - int(alpha * n))
    decisions += [1] * int(beta * n) + [0] * (n - int(beta * n))
    return decisions, labels


def test_total_error_arithmetic():
    rep = compute_metrics(*_decisions_with_rates(0.2, 0.7), prior_h1=0.5)
    assert rep.alpha == pytest.approx(0.2)
    assert rep.beta == pytest.approx(0.7)
    assert rep.total_error == pytest.approx(0.25)


def test_perfect_detector():
    rep = compute_metrics([0, 0, 1, 1], [0, 0, 1, 1])
    assert (rep.alpha, rep.beta, rep.total_error) == (0.0, 1.0, 0.0)


def test_constant_legitimate_detector():
    rep = compute_metrics([0, 0, 0, 0], [0, 1, 0, 1])
    assert (rep.alpha, rep.beta, rep.total_error) == (0.0, 0.0, 0.5)


def test_empirical_priors_give_misclassification_rate():
    decisions = [1, 0, 0, 0, 1, 1, 0, 0, 0, 0]
    labels = [1, 1, 0, 0, 0, 1, 0, 0, 0, 0]
    rep = compute_metrics(decisions, labels, EMPIRICAL)
    assert rep.prior_h1 == pytest.approx(0.3)
    assert rep.total_error == pytest.approx(2 / 10)


def test_absent_class_flags():
    rep = compute_metrics([0, 1, 0], [0, 0, 0], EMPIRICAL)
    assert rep.beta is None and "beta_undefined" in rep.undefined_flags
    assert rep.total_error == pytest.approx(1 / 3)
    rep = compute_metrics([0, 1, 0], [0, 0, 0], 0.5)
    assert rep.total_error is None and "total_error_undefined" in rep.undefined_flags


def test_errors():
    with pytest.raises(DimensionError):
        compute_metrics([0, 1], [0])
    with pytest.raises(EmptyInputError):
        compute_metrics([], [])
    with pytest.raises(InvalidParameterError):
        compute_metrics([0], [0], 1.5)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=2, max_size=60),
       st.randoms(use_true_random=False), st.floats(0, 1))
def test_permutation_invariance_and_recomputation(pairs, rnd, prior):
    labels = [int(b) for _, b in pairs]
    if len(set(labels)) < 2:
        return
    decisions = [int(a) for a, _ in pairs]
    rep = compute_metrics(decisions, labels, prior)
    shuffled = list(zip(decisions, labels))
    rnd.shuffle(shuffled)
    rep2 = compute_metrics([d for d, _ in shuffled], [l for _, l in shuffled], prior)
    assert rep == rep2
    assert rep.prior_h0 + rep.prior_h1 == 1.0
    assert rep.total_error == rep.prior_h0 * rep.alpha + rep.prior_h1 * (1 - rep.beta)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 0.7, 2.5253, 5.0, 8.0])
def test_q_function_against_scipy(x):
    assert q_function(x) == pytest.approx(norm.sf(x), rel=1e-10, abs=1e-300)


def test_analytic_oracle_examples():
    u = np.array([932.3399896453491, 2536.2389746551844, 1503.353061113361, 2797.019968936047])
    v = np.full(4, u.mean())
    assert analytic_lrt_error(u, u, 300) == 0.5
    assert np.linalg.norm(v - u) == pytest.approx(1515.2, abs=0.1)
    assert analytic_lrt_error(u, v, 300) == pytest.approx(0.0058, abs=5e-5)
    assert analytic_lrt_error(u, v * 50, 300) < 1e-300
    with pytest.raises(InvalidParameterError):
        analytic_lrt_error(u, v, 0)
    with pytest.raises(DimensionError):
        analytic_lrt_error(u, v[:3], 300)


def test_analytic_oracle_against_monte_carlo():
    # oracle check by direct simulation: draw Y under each hypothesis, apply the ||.|| rule
    rng = np.random.default_rng(2024)
    u = np.array([932.34, 2536.23, 1503.35, 2797.02])
    v = np.full(4, u.mean())
    sigma, n = 300.0, 1_000_000
    y0 = u + rng.normal(0, sigma, (n, 4))
    y1 = v + rng.normal(0, sigma, (n, 4))
    fa = np.mean(((y0 - v) ** 2).sum(1) <= ((y0 - u) ** 2).sum(1))
    miss = np.mean(((y1 - v) ** 2).sum(1) > ((y1 - u) ** 2).sum(1))
    mc = 0.5 * fa + 0.5 * miss
    p = analytic_lrt_error(u, v, sigma)
    assert abs(mc - p) < 3 * binomial_se(p, n)


def test_roc_sweep_limits_and_monotonicity(bs4):
    data = generate_dataset(bs4, ChannelParams(300, 300), 4000, 0.5, seed=12)
    lams = [1e-300, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e300]
    rows = roc_sweep(LrtDetector(300), data, lams)
    assert rows[0][1:] == (1.0, 1.0)
    assert rows[-1][1:] == (0.0, 0.0)
    alphas = [a for _, a, _ in rows]
    betas = [b for _, _, b in rows]
    assert alphas == sorted(alphas, reverse=True)
    assert betas == sorted(betas, reverse=True)


def test_roc_sweep_validation(bs4):
    data = generate_dataset(bs4, ChannelParams(), 10, 0.5, seed=0)
    with pytest.raises(InvalidParameterError):
        roc_sweep(LrtDetector(), data, [1.0, 0.5])
    with pytest.raises(InvalidParameterError):
        roc_sweep(LrtDetector(), data, [0.0, 1.0])


def test_report_csv_row():
    rep = compute_metrics([0, 1, 1, 1], [0, 0, 1, 1])
    row = rep.csv_row("lrt", 4, 300, 500, 0.5)
    assert row == "lrt,4,300.000000,500.000000,0.500000,0.500000,1.000000,0.250000,4"
