"""Velocity commands and their training distribution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Command:
    vx: float = 0.0   # forward, m/s
    vy: float = 0.0   # lateral, m/s (positive = left)
    wz: float = 0.0   # yaw rate, rad/s

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.wz])


@dataclass(frozen=True)
class CommandRanges:
    vx: tuple = (-2.0, 2.0)
    vy: tuple = (-2.0, 2.0)
    wz: tuple = (-3.14, 3.14)

    def scaled(self, factor: float) -> "CommandRanges":
        return CommandRanges(
            vx=(self.vx[0] * factor, self.vx[1] * factor),
            vy=(self.vy[0] * factor, self.vy[1] * factor),
            wz=(self.wz[0] * factor, self.wz[1] * factor),
        )


ZERO_COMMAND = Command()


def sample_command(rng: np.random.Generator,
                   ranges: CommandRanges = CommandRanges()) -> Command:
    """Uniform draw over the training box; resampled at every reset."""
    return Command(
        vx=float(rng.uniform(*ranges.vx)),
        vy=float(rng.uniform(*ranges.vy)),
        wz=float(rng.uniform(*ranges.wz)),
    )
