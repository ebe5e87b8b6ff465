"""Terrain curriculum: flat -> slopes -> steps, promoted on stable reward."""
from __future__ import annotations

from dataclasses import dataclass, replace

TERRAIN_SEQUENCE = ("flat", "slopes", "steps")


@dataclass(frozen=True)
class CurriculumConfig:
    ema_alpha: float = 0.05
    # 0.55 of the best attainable aim reward (1.0 + 0.5)
    promote_threshold: float = 0.825
    patience: int = 20   # consecutive epochs above threshold before promotion


@dataclass(frozen=True)
class CurriculumState:
    terrain_index: int = 0      # 0 flat, 1 slopes, 2 steps
    reward_ema: float = 0.0
    streak: int = 0
    started: bool = False

    @property
    def terrain_kind(self) -> str:
        return TERRAIN_SEQUENCE[self.terrain_index]


def advance_curriculum(cur: CurriculumState, epoch_reward: float,
                       cfg: CurriculumConfig = CurriculumConfig()) -> CurriculumState:
    """Fold one epoch's mean per-step reward into the EMA; promote the
    terrain once the EMA stays above threshold for `patience` epochs.
    The index never decreases and saturates at the last terrain."""
    if not cur.started:
        ema = float(epoch_reward)
    else:
        a = cfg.ema_alpha
        ema = (1.0 - a) * cur.reward_ema + a * float(epoch_reward)
    streak = cur.streak + 1 if ema > cfg.promote_threshold else 0
    index = cur.terrain_index
    if streak >= cfg.patience and index < len(TERRAIN_SEQUENCE) - 1:
        index += 1
        streak = 0
    return CurriculumState(terrain_index=index, reward_ema=ema,
                           streak=streak, started=True)
