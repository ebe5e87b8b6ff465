"""Roll-angle network switching with a hysteresis dead band."""
from __future__ import annotations

from dataclasses import dataclass

BASE = "base"
MIRROR = "mirror"
SIDES = ("left", "right")


@dataclass(frozen=True)
class SelectorConfig:
    advantage_side: str          # which lateral side the base policy handles best
    hysteresis: float = 0.05     # rad; half-width of the dead band

    def __post_init__(self):
        if self.advantage_side not in SIDES:
            raise ValueError(f"advantage_side must be one of {SIDES}")
        if self.hysteresis < 0.0:
            raise ValueError("hysteresis must be non-negative")


class NetworkSelector:
    """Stateful base/mirror chooser. Positive roll = right side down.

    With a left advantage the base policy runs while the robot tips left
    (roll < -delta) and the mirrored policy while it tips right
    (roll > +delta); inside the band the previous choice persists, so a
    single zero crossing can switch at most once. A right advantage wires
    the rule symmetrically.
    """

    def __init__(self, cfg: SelectorConfig):
        self.cfg = cfg
        self.selection = BASE

    def reset(self) -> None:
        self.selection = BASE

    def update(self, roll: float) -> str:
        d = self.cfg.hysteresis
        if self.cfg.advantage_side == "left":
            if roll > d:
                self.selection = MIRROR
            elif roll < -d:
                self.selection = BASE
        else:
            if roll < -d:
                self.selection = MIRROR
            elif roll > d:
                self.selection = BASE
        return self.selection
