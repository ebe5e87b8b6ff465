"""Per-episode domain randomization of physical parameters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sim.model import RobotModel


@dataclass(frozen=True)
class RandomizationConfig:
    enabled: bool = False
    friction_range: tuple = (0.5, 1.25)
    mass_range: tuple = (0.9, 1.1)
    kp_range: tuple = (0.9, 1.1)
    kd_range: tuple = (0.9, 1.1)
    push_speed: float = 0.5     # max magnitude of a lateral velocity kick, m/s
    push_interval: float = 5.0  # seconds between kicks; <= 0 disables pushes

    def __post_init__(self):
        for name in ("friction_range", "mass_range", "kp_range", "kd_range"):
            lo, hi = getattr(self, name)
            if not (lo <= 1.0 <= hi):
                raise ValueError(f"{name} must contain 1.0, got ({lo}, {hi})")
            if lo <= 0.0:
                raise ValueError(f"{name} must be positive")


def sample_scales(rng: np.random.Generator, cfg: RandomizationConfig) -> dict:
    """Draw one episode's parameter scales (identity when disabled)."""
    if not cfg.enabled:
        return {"friction_scale": 1.0, "mass_scale": 1.0,
                "kp_scale": 1.0, "kd_scale": 1.0}
    return {
        "friction_scale": float(rng.uniform(*cfg.friction_range)),
        "mass_scale": float(rng.uniform(*cfg.mass_range)),
        "kp_scale": float(rng.uniform(*cfg.kp_range)),
        "kd_scale": float(rng.uniform(*cfg.kd_range)),
    }


def randomize(model: RobotModel, rng: np.random.Generator,
              cfg: RandomizationConfig) -> RobotModel:
    """Scaled copy of the model for one episode; identity when disabled."""
    scales = sample_scales(rng, cfg)
    if all(v == 1.0 for v in scales.values()):
        return model
    return model.with_scales(**scales)
