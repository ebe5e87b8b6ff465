import numpy as np
import pytest

from quadbench.nn import LOG_STD_MAX, LOG_STD_MIN, GaussianHead


def test_sample_is_mean_plus_scaled_noise():
    head = GaussianHead(3, init_log_std=np.log(0.5))
    mean = np.array([1.0, -2.0, 0.0])

    class FixedRng:
        def standard_normal(self, shape):
            return np.array([1.0, 0.0, -2.0])

    out = head.sample(mean, FixedRng())
    np.testing.assert_allclose(out, mean + 0.5 * np.array([1.0, 0.0, -2.0]), atol=1e-15)


def test_log_prob_matches_scalar_formula():
    head = GaussianHead(2, init_log_std=0.3)
    mean = np.array([0.5, -1.0])
    action = np.array([1.5, -0.2])
    sigma = np.exp(0.3)
    expected = sum(
        -0.5 * ((a - m) / sigma) ** 2 - np.log(sigma) - 0.5 * np.log(2 * np.pi)
        for a, m in zip(action, mean)
    )
    assert head.log_prob(mean, action) == pytest.approx(expected, abs=1e-12)


def test_log_prob_finite_for_finite_inputs():
    head = GaussianHead(12)
    rng = np.random.default_rng(0)
    for _ in range(100):
        mean = rng.standard_normal(12) * 10
        action = rng.standard_normal(12) * 10
        assert np.isfinite(head.log_prob(mean, action))


def test_density_integrates_to_one_on_grid():
    # 1-D: integrate exp(log_prob) with the trapezoid rule
    head = GaussianHead(1, init_log_std=np.log(0.7))
    xs = np.linspace(-8.0, 8.0, 20001)
    dens = np.exp([head.log_prob(np.zeros(1), np.array([x])) for x in xs])
    integral = np.trapezoid(dens, xs)
    assert integral == pytest.approx(1.0, abs=1e-3)


def test_log_prob_grads_match_finite_differences():
    head = GaussianHead(4, init_log_std=-0.2)
    rng = np.random.default_rng(8)
    mean = rng.standard_normal(4)
    action = rng.standard_normal(4)
    g_mean, g_ls = head.log_prob_grads(mean, action)
    h = 1e-6
    for i in range(4):
        mp, mm = mean.copy(), mean.copy()
        mp[i] += h
        mm[i] -= h
        fd = (head.log_prob(mp, action) - head.log_prob(mm, action)) / (2 * h)
        assert g_mean[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)
    for i in range(4):
        orig = head.log_std[i]
        head.log_std[i] = orig + h
        hi = head.log_prob(mean, action)
        head.log_std[i] = orig - h
        lo = head.log_prob(mean, action)
        head.log_std[i] = orig
        assert g_ls[i] == pytest.approx((hi - lo) / (2 * h), rel=1e-5, abs=1e-8)


def test_entropy_matches_closed_form():
    head = GaussianHead(3, init_log_std=0.1)
    expected = 3 * (0.1 + 0.5 * np.log(2 * np.pi * np.e))
    assert head.entropy() == pytest.approx(expected, abs=1e-12)


def test_clamp_bounds():
    head = GaussianHead(2)
    head.log_std[...] = [-10.0, 10.0]
    head.clamp()
    np.testing.assert_array_equal(head.log_std, [LOG_STD_MIN, LOG_STD_MAX])
