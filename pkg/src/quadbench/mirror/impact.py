"""Push-test field: alternating lateral velocity kicks locate the side the
policy handles best.

Protocol: 30 trials alternate rightward (even counter) and leftward pushes
with magnitudes drawn below V_max; falls are counted per side. More falls
to the right means the policy's advantage side is the left. Ties halve
V_max (falls on both sides: pushes too hard) or raise it by half (no falls:
too soft) and the whole procedure restarts, up to a round cap.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..env.locomotion import LocomotionEnv, OUTCOME_FELL


@dataclass(frozen=True)
class ImpactTestConfig:
    total_trials: int = 30
    push_interval: float = 2.0    # seconds simulated after each push
    v_max_init: float = 1.0       # m/s
    max_rounds: int = 8           # outer V_max adaptation cap
    settle_time: float = 0.5      # stabilization time after every reset


@dataclass(frozen=True)
class PushTrial:
    index: int
    side: str          # "left" or "right" (push direction)
    speed: float       # signed lateral velocity, m/s
    fell: bool


@dataclass
class ImpactTestResult:
    fall_left: int = 0
    fall_right: int = 0
    left_advantage: bool | None = None
    decisive: bool = False
    v_max_final: float = 0.0
    rounds: int = 0
    v_max_history: list = field(default_factory=list)
    trials: list = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "fall_left": self.fall_left,
            "fall_right": self.fall_right,
            "left_advantage": self.left_advantage,
            "decisive": self.decisive,
            "v_max_final": self.v_max_final,
            "rounds": self.rounds,
            "v_max_history": list(self.v_max_history),
            "trials": [
                {"index": t.index, "side": t.side, "speed": t.speed, "fell": t.fell}
                for t in self.trials
            ],
        }


class InconclusiveImpactTestError(RuntimeError):
    """The push test hit its round cap without a decisive fall comparison."""

    def __init__(self, result: ImpactTestResult):
        super().__init__("impact test inconclusive after "
                         f"{result.rounds} rounds")
        self.result = result


def _default_trial(controller, env: LocomotionEnv, speed: float,
                   duration: float) -> bool:
    """Kick the base laterally to `speed` and run the controller; True if
    the robot falls within the interval."""
    state = env.state
    state.base_lin_vel[1] = speed
    env.set_state(state)
    obs = env.observe_now()
    steps = max(1, int(round(duration / env.cfg.control_dt)))
    for _ in range(steps):
        obs, _, done, info = env.step(controller(obs))
        if done:
            return info["outcome"] == OUTCOME_FELL
    return False


def _settle(controller, env: LocomotionEnv, duration: float) -> None:
    obs = env.reset()
    for _ in range(max(1, int(round(duration / env.cfg.control_dt)))):
        obs, _, done, _ = env.step(controller(obs))
        if done:
            obs = env.reset()


def impact_test(controller, env: LocomotionEnv, cfg: ImpactTestConfig,
                rng: np.random.Generator, trial_fn=None) -> ImpactTestResult:
    """Run the push-test procedure; raises on an indecisive round cap.

    `controller` maps an observation to an action. The env must hold zero
    commands (the test measures balance, not tracking) and an episode limit
    beyond the test horizon. `trial_fn(controller, env, speed, duration)`
    is injectable for scripted tests.
    """
    cmd = env.cfg.fixed_command
    if cmd is None or (cmd.vx, cmd.vy, cmd.wz) != (0.0, 0.0, 0.0):
        raise ValueError("impact test requires a fixed zero command")
    run_trial = trial_fn or _default_trial
    result = ImpactTestResult(v_max_final=cfg.v_max_init)
    v_max = cfg.v_max_init
    for round_index in range(cfg.max_rounds):
        result.rounds = round_index + 1
        result.v_max_history.append(v_max)
        fall_left = fall_right = 0
        _settle(controller, env, cfg.settle_time)
        for counter in range(cfg.total_trials):
            if counter % 2 == 0:
                side = "right"
                speed = float(rng.uniform(-v_max, 0.0))
            else:
                side = "left"
                speed = float(rng.uniform(0.0, v_max))
            fell = bool(run_trial(controller, env, speed, cfg.push_interval))
            result.trials.append(PushTrial(index=counter, side=side,
                                           speed=speed, fell=fell))
            if fell:
                if side == "right":
                    fall_right += 1
                else:
                    fall_left += 1
                _settle(controller, env, cfg.settle_time)
        result.fall_left = fall_left
        result.fall_right = fall_right
        result.v_max_final = v_max
        if fall_right > fall_left:
            result.left_advantage = True
            result.decisive = True
            return result
        if fall_right < fall_left:
            result.left_advantage = False
            result.decisive = True
            return result
        v_max = 0.5 * v_max if fall_right != 0 else 1.5 * v_max
    raise InconclusiveImpactTestError(result)
