import numpy as np
import pytest

from quadbench.ppo import compute_gae, normalize_advantages


def _brute_force_gae(rewards, values, dones, last_values, gamma, lam):
    """Direct summation form of the recursion, explicit python loops."""
    steps, n = rewards.shape
    adv = np.zeros((steps, n))
    for e in range(n):
        for t in range(steps):
            acc = 0.0
            weight = 1.0
            for k in range(t, steps):
                v_next = last_values[e] if k == steps - 1 else values[k + 1, e]
                delta = rewards[k, e] + gamma * v_next * (1.0 - dones[k, e]) - values[k, e]
                acc += weight * delta
                if dones[k, e]:
                    break
                weight *= gamma * lam
            adv[t, e] = acc
    return adv, adv + values


def test_lambda_zero_all_dones_is_one_step_td():
    rng = np.random.default_rng(0)
    rewards = rng.standard_normal((6, 3))
    values = rng.standard_normal((6, 3))
    dones = np.ones((6, 3), dtype=bool)
    adv, ret = compute_gae(rewards, values, dones, np.zeros(3), 0.99, 0.0)
    np.testing.assert_allclose(adv, rewards - values, atol=1e-15)
    np.testing.assert_allclose(ret, rewards, atol=1e-15)


def test_monte_carlo_limit_is_suffix_sums():
    # lambda = 1, V = 0, gamma = 1, one episode: A_t = sum of future rewards
    rewards = np.array([[1.0], [2.0], [3.0], [4.0]])
    values = np.zeros((4, 1))
    dones = np.zeros((4, 1), dtype=bool)
    dones[-1] = True
    adv, _ = compute_gae(rewards, values, dones, np.zeros(1), 1.0, 1.0)
    np.testing.assert_allclose(adv[:, 0], [10.0, 9.0, 7.0, 4.0], atol=1e-15)


def test_bootstrap_through_truncation():
    # no done at the end: last_values must bootstrap
    rewards = np.array([[1.0], [1.0]])
    values = np.array([[0.5], [0.5]])
    dones = np.zeros((2, 1), dtype=bool)
    last = np.array([2.0])
    gamma, lam = 0.9, 0.8
    adv, _ = compute_gae(rewards, values, dones, last, gamma, lam)
    d1 = 1.0 + gamma * 2.0 - 0.5
    d0 = 1.0 + gamma * 0.5 - 0.5
    np.testing.assert_allclose(adv[1, 0], d1, atol=1e-15)
    np.testing.assert_allclose(adv[0, 0], d0 + gamma * lam * d1, atol=1e-15)


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(42)
    for _ in range(100):
        steps, n = 20, 2
        rewards = rng.standard_normal((steps, n))
        values = rng.standard_normal((steps, n))
        dones = rng.random((steps, n)) < 0.15
        last = rng.standard_normal(n)
        gamma = rng.uniform(0.9, 0.999)
        lam = rng.uniform(0.8, 1.0)
        adv, ret = compute_gae(rewards, values, dones, last, gamma, lam)
        b_adv, b_ret = _brute_force_gae(rewards, values, dones, last, gamma, lam)
        np.testing.assert_allclose(adv, b_adv, atol=1e-12)
        np.testing.assert_allclose(ret, b_ret, atol=1e-12)
        assert np.all(np.isfinite(adv))


def test_normalize_advantages():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((50, 4)) * 3 + 2
    z = normalize_advantages(a)
    assert z.mean() == pytest.approx(0.0, abs=1e-12)
    assert z.std() == pytest.approx(1.0, abs=1e-6)
