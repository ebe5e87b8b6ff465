"""Exponentially weighted advantage estimation over (steps, envs) arrays."""
from __future__ import annotations

import numpy as np


def compute_gae(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
                last_values: np.ndarray, gamma: float, lam: float):
    """Advantages and returns from TD residuals.

    delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
    A_t     = delta_t + gamma * lam * (1 - done_t) * A_{t+1}
    returns = A + V

    `last_values` bootstraps the step after the final row. Advantages are
    returned raw; batch normalization happens in the update.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    not_done = 1.0 - np.asarray(dones, dtype=np.float64)
    steps = rewards.shape[0]
    advantages = np.zeros_like(rewards)
    gae = np.zeros_like(np.atleast_1d(last_values), dtype=np.float64)
    next_values = np.asarray(last_values, dtype=np.float64)
    for t in range(steps - 1, -1, -1):
        delta = rewards[t] + gamma * next_values * not_done[t] - values[t]
        gae = delta + gamma * lam * not_done[t] * gae
        advantages[t] = gae
        next_values = values[t]
    return advantages, advantages + values


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    """Zero-mean unit-std copy (whole-batch statistics)."""
    mean = advantages.mean()
    std = advantages.std()
    return (advantages - mean) / (std + 1e-8)
