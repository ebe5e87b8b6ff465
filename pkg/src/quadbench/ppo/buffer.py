"""Trajectory storage for on-policy updates, with command-side tags."""
from __future__ import annotations

import numpy as np


class RolloutBuffer:
    """Fixed-size (steps, envs) arrays filled during collection.

    Besides the PPO quantities, every step records the sign of the lateral
    velocity command (+1 left, -1 right, 0 none) so the trainer can track
    the left/right sample balance.
    """

    def __init__(self, steps: int, num_envs: int, obs_dim: int, act_dim: int):
        self.steps = steps
        self.num_envs = num_envs
        self.obs = np.zeros((steps, num_envs, obs_dim))
        self.actions = np.zeros((steps, num_envs, act_dim))
        self.log_probs = np.zeros((steps, num_envs))
        self.rewards = np.zeros((steps, num_envs))
        self.dones = np.zeros((steps, num_envs), dtype=bool)
        self.values = np.zeros((steps, num_envs))
        self.side_tags = np.zeros((steps, num_envs), dtype=np.int8)
        self.advantages = np.zeros((steps, num_envs))
        self.returns = np.zeros((steps, num_envs))
        self.last_values = np.zeros(num_envs)
        self._cursor = 0

    def __len__(self) -> int:
        return self._cursor * self.num_envs

    @property
    def full(self) -> bool:
        return self._cursor == self.steps

    def add(self, obs, actions, log_probs, rewards, dones, values, side_tags) -> None:
        if self.full:
            raise RuntimeError("rollout buffer is full")
        t = self._cursor
        self.obs[t] = obs
        self.actions[t] = actions
        self.log_probs[t] = log_probs
        self.rewards[t] = rewards
        self.dones[t] = dones
        self.values[t] = values
        self.side_tags[t] = side_tags
        self._cursor += 1

    def flat(self, name: str) -> np.ndarray:
        """Time-major flattening to (steps * envs, ...)."""
        a = getattr(self, name)
        return a.reshape(a.shape[0] * a.shape[1], *a.shape[2:])

    def side_counts(self):
        """(left, right) counts of the recorded command tags."""
        left = int(np.sum(self.side_tags == 1))
        right = int(np.sum(self.side_tags == -1))
        return left, right
