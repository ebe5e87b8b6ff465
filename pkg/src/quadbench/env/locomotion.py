"""The training environment: simulator wrapped as a command-tracking MDP.

One control step = drive mapping evaluated at the simulator rate across
`control_dt / sim_dt` simulator steps (torque recomputed from the held
action each sim step). Episodes end on body contact or at the time limit;
commands are resampled only at reset.

The batched env owns N independent robots stepped together; the single-env
class is the N=1 wrapper with manual-reset semantics.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..sim.dynamics import ModelArrays, drive_map_arrays, step_batch
from ..sim.model import RobotModel
from ..sim.state import SimBatch, SimState, default_state
from ..sim.terrain import TerrainBatch, flat_terrain, make_terrain
from .commands import Command, CommandRanges, sample_command
from .curriculum import TERRAIN_SEQUENCE
from .observation import (
    ANG_VEL,
    ATTITUDE,
    JOINT_POS,
    JOINT_VEL,
    LIN_VEL,
    observe_batch,
)
from .randomization import RandomizationConfig, sample_scales
from .rewards import RewardWeights, reward_batch

OUTCOME_CONTINUE = "continue"
OUTCOME_FELL = "fell"
OUTCOME_TIMEOUT = "timeout"


class EpisodeDoneError(RuntimeError):
    """step() was called on a finished episode without a reset."""


def check_reset(state: SimState, t: float, episode_limit: float = 15.0) -> str:
    """Reset outcome: fell on body contact, timeout at the episode limit."""
    if state.body_contact:
        return OUTCOME_FELL
    if t >= episode_limit:
        return OUTCOME_TIMEOUT
    return OUTCOME_CONTINUE


@dataclass
class EnvConfig:
    control_dt: float = 0.02
    sim_dt: float = 0.005
    episode_limit: float = 15.0
    spawn_height: float = 0.30
    command_ranges: CommandRanges = field(default_factory=CommandRanges)
    reward_weights: RewardWeights = field(default_factory=RewardWeights)
    randomization: RandomizationConfig = field(default_factory=RandomizationConfig)
    terrain_kind: str = "flat"
    observation_noise: float = 0.0    # optional sensor noise, off by default
    fixed_command: Command | None = None   # overrides sampling when set

    def __post_init__(self):
        ratio = self.control_dt / self.sim_dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("control_dt must be an integer multiple of sim_dt")
        if self.terrain_kind not in TERRAIN_SEQUENCE:
            raise ValueError(f"unknown terrain kind {self.terrain_kind!r}")

    @property
    def decimation(self) -> int:
        return int(round(self.control_dt / self.sim_dt))


class BatchedLocomotionEnv:
    """N independent environments stepped synchronously as arrays."""

    def __init__(self, model: RobotModel, cfg: EnvConfig, num_envs: int, seed: int):
        self.model = model
        self.cfg = cfg
        self.n = num_envs
        self.seed = seed
        self._rngs = [np.random.default_rng(s)
                      for s in np.random.SeedSequence(seed).spawn(num_envs)]
        self.batch = SimBatch(num_envs)
        self.arrays = ModelArrays(model, num_envs)
        self.commands = np.zeros((num_envs, 3))
        self.last_actions = np.zeros((num_envs, 12))
        self.episode_time = np.zeros(num_envs)
        self.episode_reward = np.zeros(num_envs)
        self.episode_len = np.zeros(num_envs, dtype=np.int64)
        self.next_push = np.full(num_envs, np.inf)
        self.terrain_stage = TERRAIN_SEQUENCE.index(cfg.terrain_kind)
        self._build_terrains()

    # -------------------------------------------------- terrain curriculum

    def _terrain_seed(self, env_index: int) -> int:
        return (self.seed * 1000003 + self.terrain_stage * 8191 + env_index) & 0x7FFFFFFF

    def _build_terrains(self) -> None:
        kind = TERRAIN_SEQUENCE[self.terrain_stage]
        if kind == "flat":
            terrains = [flat_terrain()] * self.n
        else:
            terrains = [make_terrain(kind, seed=self._terrain_seed(i))
                        for i in range(self.n)]
        self.terrains = terrains
        self.terrain_batch = TerrainBatch(terrains)

    def set_terrain_stage(self, stage: int) -> None:
        """Move every env to the given curriculum terrain and reset."""
        if stage < self.terrain_stage:
            raise ValueError("terrain stage never decreases within a run")
        if stage != self.terrain_stage:
            self.terrain_stage = stage
            self._build_terrains()
        self.reset_all()

    # -------------------------------------------------- resets

    def _sample_command(self, i: int) -> np.ndarray:
        if self.cfg.fixed_command is not None:
            return self.cfg.fixed_command.as_array()
        return sample_command(self._rngs[i], self.cfg.command_ranges).as_array()

    def reset_env(self, i: int) -> None:
        rng = self._rngs[i]
        scales = sample_scales(rng, self.cfg.randomization)
        self.arrays.set_env_scales(i, **scales)
        state = default_state(self.model, self.terrains[i],
                              spawn_height=self.cfg.spawn_height)
        self.batch.set_state(i, state)
        self.commands[i] = self._sample_command(i)
        self.last_actions[i] = 0.0
        self.episode_time[i] = 0.0
        self.episode_reward[i] = 0.0
        self.episode_len[i] = 0
        rand = self.cfg.randomization
        if rand.enabled and rand.push_interval > 0.0:
            self.next_push[i] = rand.push_interval
        else:
            self.next_push[i] = np.inf

    def reset_all(self) -> np.ndarray:
        for i in range(self.n):
            self.reset_env(i)
        return self._observe()

    # -------------------------------------------------- stepping

    def _observe(self) -> np.ndarray:
        obs = observe_batch(self.batch, self.commands, self.last_actions)
        if self.cfg.observation_noise > 0.0:
            for block in (LIN_VEL, ANG_VEL, ATTITUDE, JOINT_POS, JOINT_VEL):
                for i in range(self.n):
                    obs[i, block] += self.cfg.observation_noise * \
                        self._rngs[i].standard_normal(block.stop - block.start)
        return obs

    def _apply_pushes(self) -> None:
        rand = self.cfg.randomization
        due = self.episode_time >= self.next_push
        for i in np.flatnonzero(due):
            rng = self._rngs[i]
            angle = rng.uniform(0.0, 2.0 * np.pi)
            speed = rng.uniform(0.0, rand.push_speed)
            self.batch.vel_w[i, 0] += speed * np.cos(angle)
            self.batch.vel_w[i, 1] += speed * np.sin(angle)
            self.next_push[i] += rand.push_interval

    def step(self, actions: np.ndarray):
        """Advance one control step; auto-resets finished envs.

        Returns (obs, rewards, dones, info) where info holds vectorized
        episode bookkeeping: outcome flags, terminal observations for the
        finished rows, and divergence markers.
        """
        actions = np.asarray(actions, dtype=np.float64)
        if actions.shape != (self.n, 12):
            raise ValueError(f"actions must have shape ({self.n}, 12)")
        diverged = np.zeros(self.n, dtype=bool)
        tau = np.zeros((self.n, 12))
        with np.errstate(all="ignore"):
            for _ in range(self.cfg.decimation):
                tau = drive_map_arrays(actions, self.batch.theta,
                                       self.batch.theta_dot, self.model.theta0,
                                       self.arrays.kp[:, None], self.arrays.kd[:, None],
                                       self.model.tau_max)
                diverged |= step_batch(self.batch, tau, self.terrain_batch,
                                       self.cfg.sim_dt, self.arrays)
        self.episode_time += self.cfg.control_dt
        self.episode_len += 1

        with np.errstate(invalid="ignore"):
            rewards, lv_terms = reward_batch(self.batch, self.commands, tau,
                                             actions, self.last_actions,
                                             self.cfg.reward_weights)
        rewards = np.where(diverged, 0.0, rewards)
        lv_terms = np.where(diverged, 0.0, lv_terms)
        self.episode_reward += rewards

        fell = self.batch.body_contact | diverged
        timeout = (~fell) & (self.episode_time >= self.cfg.episode_limit - 1e-9)
        dones = fell | timeout

        self.last_actions[...] = actions
        self._apply_pushes()

        info = {
            "timeout": timeout,
            "fell": fell,
            "diverged": diverged,
            "lv_terms": lv_terms,
        }
        done_idx = np.flatnonzero(dones)
        if done_idx.size:
            terminal_obs = observe_batch(self.batch, self.commands,
                                         self.last_actions)[done_idx]
            info["done_indices"] = done_idx
            info["terminal_observations"] = terminal_obs
            info["episode_rewards"] = self.episode_reward[done_idx].copy()
            info["episode_lengths"] = self.episode_len[done_idx].copy()
            for i in done_idx:
                self.reset_env(int(i))
        return self._observe(), rewards, dones, info


class LocomotionEnv:
    """Single-robot env with manual-reset semantics (the spec contract)."""

    def __init__(self, model: RobotModel, cfg: EnvConfig, seed: int = 0):
        self._core = BatchedLocomotionEnv(model, cfg, 1, seed)
        self.cfg = cfg
        self._done = True   # must call reset() first

    @property
    def state(self) -> SimState:
        return self._core.batch.state(0)

    @property
    def command(self) -> Command:
        c = self._core.commands[0]
        return Command(vx=float(c[0]), vy=float(c[1]), wz=float(c[2]))

    def set_command(self, cmd: Command) -> None:
        self._core.commands[0] = cmd.as_array()

    def set_state(self, state: SimState) -> None:
        self._core.batch.set_state(0, state)

    def observe_now(self) -> np.ndarray:
        """Current observation without stepping (after set_state/set_command)."""
        return self._core._observe()[0]

    def reset(self) -> np.ndarray:
        obs = self._core.reset_all()
        self._done = False
        return obs[0]

    def step(self, action: np.ndarray):
        if self._done:
            raise EpisodeDoneError("episode finished; call reset() before stepping")
        action = np.asarray(action, dtype=np.float64).reshape(12)
        # capture terminal quantities before the core auto-resets
        obs, rewards, dones, core_info = self._core.step(action[None, :])
        done = bool(dones[0])
        info = {
            "timeout": bool(core_info["timeout"][0]),
            "diverged": bool(core_info["diverged"][0]),
            "lv_term": float(core_info["lv_terms"][0]),
        }
        if done:
            self._done = True
            info["outcome"] = OUTCOME_TIMEOUT if info["timeout"] else OUTCOME_FELL
            info["terminal_observation"] = core_info["terminal_observations"][0]
            info["episode_reward"] = float(core_info["episode_rewards"][0])
            info["episode_length"] = int(core_info["episode_lengths"][0])
            obs_out = info["terminal_observation"]
        else:
            info["outcome"] = OUTCOME_CONTINUE
            obs_out = obs[0]
        return obs_out, float(rewards[0]), done, info
