"""Policy wrapper that acts in the reflected world and maps the action back."""
from __future__ import annotations

import numpy as np

from .maps import SignedPermutation


def mirror_eval(policy, state_map: SignedPermutation,
                action_map: SignedPermutation, obs: np.ndarray) -> np.ndarray:
    """action_map . policy . state_map applied to one observation (or batch)."""
    return action_map.apply(policy(state_map.apply(obs)))


class MirroredPolicy:
    """Callable view of a base policy evaluated through the mirror maps."""

    def __init__(self, base, state_map: SignedPermutation,
                 action_map: SignedPermutation):
        self.base = base
        self.state_map = state_map
        self.action_map = action_map

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        return mirror_eval(self.base, self.state_map, self.action_map, obs)
