"""Signed-permutation maps that reflect observations and actions left-right.

A pure diagonal sign matrix cannot represent the reflection because the
left and right leg blocks swap; the signed permutation (y[i] =
signs[i] * x[perm[i]]) subsumes the diagonal case and stays an involution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env.observation import BLOCK_SLICES, OBS_DIM
from ..sim.state import JOINT_MIRROR_PERM, JOINT_MIRROR_SIGN


class MirrorConfigError(ValueError):
    """The observation layout or joint convention is not the supported one."""


@dataclass(frozen=True)
class SignedPermutation:
    perm: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        signs = np.asarray(self.signs, dtype=np.float64)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)
        n = perm.shape[0]
        if signs.shape != (n,):
            raise ValueError("perm and signs must have equal length")
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("perm must be a bijection of 0..n-1")
        if not np.all(np.abs(signs) == 1.0):
            raise ValueError("signs must be +1 or -1")

    @property
    def size(self) -> int:
        return self.perm.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.size:
            raise ValueError(f"expected trailing dimension {self.size}, got {x.shape[-1]}")
        return self.signs * x[..., self.perm]

    def is_involution(self) -> bool:
        return (np.array_equal(self.perm[self.perm], np.arange(self.size))
                and np.all(self.signs * self.signs[self.perm] == 1.0))

    def to_doc(self) -> dict:
        return {"perm": self.perm.tolist(), "signs": self.signs.tolist()}

    @classmethod
    def from_doc(cls, doc: dict) -> "SignedPermutation":
        return cls(perm=np.array(doc["perm"]), signs=np.array(doc["signs"]))


# the only layout this build ships; build_mirror_maps validates against it
CANONICAL_OBS_LAYOUT = (
    ("lin_vel", 3), ("ang_vel", 3), ("command", 3), ("attitude", 3),
    ("joint_pos", 12), ("joint_vel", 12), ("last_action", 12),
)
CANONICAL_JOINT_CONVENTION = ("FL", "FR", "RL", "RR")

# per-block sign patterns of the x-z-plane reflection
_BLOCK_SIGNS = {
    "lin_vel": np.array([1.0, -1.0, 1.0]),
    "ang_vel": np.array([-1.0, 1.0, -1.0]),
    "command": np.array([1.0, -1.0, -1.0]),
    "attitude": np.array([1.0, -1.0, 1.0]),
}


def build_mirror_maps(obs_layout=CANONICAL_OBS_LAYOUT,
                      joint_convention=CANONICAL_JOINT_CONVENTION):
    """State and action mirror maps for the canonical layout.

    Raises MirrorConfigError for any other layout: the joint indexing that
    would make these maps purely diagonal is not something we guess.
    """
    if tuple(obs_layout) != CANONICAL_OBS_LAYOUT:
        raise MirrorConfigError(f"unsupported observation layout: {obs_layout!r}")
    if tuple(joint_convention) != CANONICAL_JOINT_CONVENTION:
        raise MirrorConfigError(f"unsupported joint convention: {joint_convention!r}")

    perm = np.arange(OBS_DIM)
    signs = np.ones(OBS_DIM)
    for name, sl in BLOCK_SLICES.items():
        if name in _BLOCK_SIGNS:
            signs[sl] = _BLOCK_SIGNS[name]
        else:  # joint_pos, joint_vel, last_action: leg swap + abduction flip
            base = sl.start
            perm[sl] = base + JOINT_MIRROR_PERM
            signs[sl] = JOINT_MIRROR_SIGN
    state_map = SignedPermutation(perm=perm, signs=signs)
    action_map = SignedPermutation(perm=JOINT_MIRROR_PERM.copy(),
                                   signs=JOINT_MIRROR_SIGN.copy())
    return state_map, action_map
