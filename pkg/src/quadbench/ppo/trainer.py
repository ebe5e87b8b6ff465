"""Clipped-surrogate policy optimization over the batched environment.

The update maximizes min(ratio * A, clip(ratio) * A) with minibatch passes
that stop early once the approximate KL to the pre-update policy exceeds
the threshold (or, in adaptive mode, steer the learning rate instead).
Gradients flow through the hand-rolled dense nets; policy and value each
own an Adam state.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..env.curriculum import CurriculumConfig, CurriculumState, advance_curriculum
from ..env.locomotion import BatchedLocomotionEnv, EnvConfig
from ..nn.adam import AdamState, NonFiniteGradientError, adam_step
from ..nn.checkpoint import (
    FORMAT_VERSION,
    adam_from_doc,
    adam_to_doc,
    decode_array,
    encode_array,
    net_from_doc,
    net_to_doc,
)
from ..nn.dense import DenseNet
from ..nn.gaussian import GaussianHead
from ..sim.model import RobotModel
from .buffer import RolloutBuffer
from .gae import compute_gae, normalize_advantages
from .telemetry import TelemetryWriter, symmetry_ratio

POLICY_LAYERS = [48, 512, 256, 128, 12]
VALUE_LAYERS = [48, 512, 256, 128, 1]


@dataclass
class PPOConfig:
    gamma: float = 0.99
    clip_epsilon: float = 0.2
    kl_threshold: float = 0.008
    lr_init: float = 3e-4
    lr_min: float = 1e-6
    total_epochs: int = 1500
    batch_size: int = 8192          # env steps per epoch (paper scale: 98304)
    num_envs: int = 64
    gae_lambda: float = 0.95
    update_epochs: int = 4
    num_minibatches: int = 4
    value_coef: float = 0.5
    entropy_coef: float = 0.005
    max_grad_norm: float = 1.0      # 0 disables clipping
    kl_mode: str = "early_stop"     # or "adaptive" (lr steering, no stop)
    checkpoint_every: int = 100
    policy_layers: tuple = tuple(POLICY_LAYERS)
    value_layers: tuple = tuple(VALUE_LAYERS)

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must be in (0, 1)")
        if self.clip_epsilon <= 0.0:
            raise ValueError("clip_epsilon must be positive")
        if self.lr_min > self.lr_init:
            raise ValueError("lr_min must not exceed lr_init")
        if self.batch_size % self.num_envs != 0:
            raise ValueError("batch_size must be a multiple of num_envs")
        if self.kl_mode not in ("early_stop", "adaptive"):
            raise ValueError(f"unknown kl_mode {self.kl_mode!r}")

    @property
    def steps_per_env(self) -> int:
        return self.batch_size // self.num_envs


def lr_at(epoch: int, cfg: PPOConfig) -> float:
    """Linear decay from lr_init, floored at lr_min."""
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    return max(cfg.lr_min, cfg.lr_init * (1.0 - epoch / cfg.total_epochs))


class PolicyBundle:
    """Policy net + Gaussian head + value net, each with its Adam state."""

    def __init__(self, cfg: PPOConfig, rng: np.random.Generator):
        self.policy = DenseNet(list(cfg.policy_layers), rng=rng)
        self.head = GaussianHead(cfg.policy_layers[-1])
        self.value = DenseNet(list(cfg.value_layers), rng=rng, output_gain=1.0)
        self.policy_adam = AdamState.for_params(self._policy_params())
        self.value_adam = AdamState.for_params(self.value.parameters())

    def _policy_params(self):
        return self.policy.parameters() + [self.head.log_std]

    def act_mean(self, obs: np.ndarray) -> np.ndarray:
        return self.policy.forward(obs)

    def values_of(self, obs: np.ndarray) -> np.ndarray:
        v = self.value.forward(obs)
        return v[..., 0]


def collect(bundle: PolicyBundle, env: BatchedLocomotionEnv, obs: np.ndarray,
            steps: int, gamma: float, rng: np.random.Generator):
    """Gather `steps` transitions per env; returns (buffer, next_obs, episode stats).

    The policy is read-only here. Episodes truncated by the time limit are
    value-bootstrapped by folding gamma * V(terminal) into the step reward.
    """
    buf = RolloutBuffer(steps, env.n, obs.shape[1], bundle.head.dim)
    ep_rewards: list[float] = []
    ep_lengths: list[int] = []
    lv_sum, lv_count = 0.0, 0
    for _ in range(steps):
        mean = bundle.act_mean(obs)
        actions = bundle.head.sample(mean, rng)
        log_probs = bundle.head.log_prob(mean, actions)
        values = bundle.values_of(obs)
        side = np.sign(obs[:, 7]).astype(np.int8)   # lateral command entry
        next_obs, rewards, dones, info = env.step(actions)
        if "done_indices" in info:
            idx = info["done_indices"]
            timeouts = info["timeout"][idx]
            if timeouts.any():
                term_v = bundle.values_of(info["terminal_observations"][timeouts])
                rewards = rewards.copy()
                rewards[idx[timeouts]] += gamma * term_v
            ep_rewards.extend(info["episode_rewards"].tolist())
            ep_lengths.extend(info["episode_lengths"].tolist())
        lv_sum += float(info["lv_terms"].sum())
        lv_count += env.n
        buf.add(obs, actions, log_probs, rewards, dones, values, side)
        obs = next_obs
    buf.last_values[...] = bundle.values_of(obs)
    stats = {
        "episode_rewards": ep_rewards,
        "episode_lengths": ep_lengths,
        "mean_lv": lv_sum / max(lv_count, 1),
    }
    return buf, obs, stats


def _global_grad_norm(grads) -> float:
    total = 0.0
    for g in grads:
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def _clip_grads(grads, max_norm: float) -> None:
    if max_norm <= 0.0:
        return
    norm = _global_grad_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads:
            g *= scale


def update(bundle: PolicyBundle, buf: RolloutBuffer, cfg: PPOConfig,
           epoch: int, rng: np.random.Generator, current_lr: float | None = None):
    """One optimization phase over a full rollout buffer.

    Returns a stats dict. In early_stop mode no minibatch update is applied
    at or after the first KL measurement above the threshold; in adaptive
    mode the learning rate is steered instead.
    """
    adv_raw, returns = compute_gae(buf.rewards, buf.values, buf.dones,
                                   buf.last_values, cfg.gamma, cfg.gae_lambda)
    advantages = normalize_advantages(adv_raw)

    obs = buf.flat("obs")
    actions = buf.flat("actions")
    old_logp = buf.log_probs.reshape(-1)
    adv = advantages.reshape(-1)
    ret = returns.reshape(-1)

    lr = lr_at(epoch, cfg) if current_lr is None else current_lr
    n = obs.shape[0]
    mb_size = n // cfg.num_minibatches
    eps = cfg.clip_epsilon

    policy_params = bundle._policy_params()
    snapshot = [p.copy() for p in policy_params] + bundle.value.copy_parameters()

    kl_history: list[float] = []
    pi_losses: list[float] = []
    v_losses: list[float] = []
    updates_applied = 0
    early_stopped = False

    try:
        for _ in range(cfg.update_epochs):
            if early_stopped:
                break
            perm = rng.permutation(n)
            for mb in range(cfg.num_minibatches):
                idx = perm[mb * mb_size:(mb + 1) * mb_size]
                mean = bundle.policy.forward(obs[idx])
                logp = bundle.head.log_prob(mean, actions[idx])
                approx_kl = float(np.mean(old_logp[idx] - logp))
                kl_history.append(approx_kl)
                if cfg.kl_mode == "early_stop" and approx_kl > cfg.kl_threshold:
                    early_stopped = True
                    break
                if cfg.kl_mode == "adaptive":
                    if approx_kl > 2.0 * cfg.kl_threshold:
                        lr = max(cfg.lr_min, lr / 1.5)
                    elif 0.0 < approx_kl < cfg.kl_threshold / 2.0:
                        lr = min(1e-2, lr * 1.5)

                a = adv[idx]
                ratio = np.exp(logp - old_logp[idx])
                s1 = ratio * a
                s2 = np.clip(ratio, 1.0 - eps, 1.0 + eps) * a
                surrogate = np.minimum(s1, s2)
                pi_loss = -float(np.mean(surrogate)) - cfg.entropy_coef * bundle.head.entropy()
                if not np.isfinite(pi_loss):
                    raise NonFiniteGradientError("non-finite policy loss")

                # d(-surrogate)/d logp: active when the unclipped branch is
                # selected or the ratio sits inside the clip band
                active = (s1 <= s2) | ((ratio > 1.0 - eps) & (ratio < 1.0 + eps))
                dlogp = np.where(active, -a * ratio, 0.0) / len(idx)
                g_mean_per, g_ls_per = bundle.head.log_prob_grads(mean, actions[idx])
                grad_mean = dlogp[:, None] * g_mean_per
                wg, bg, _ = bundle.policy.backward(obs[idx], grad_mean)
                grad_log_std = (dlogp[:, None] * g_ls_per).sum(axis=0) - cfg.entropy_coef
                grads = []
                for w, b in zip(wg, bg):
                    grads.append(w)
                    grads.append(b)
                grads.append(grad_log_std)
                _clip_grads(grads, cfg.max_grad_norm)
                adam_step(policy_params, grads, bundle.policy_adam, lr)
                bundle.head.clamp()

                v = bundle.values_of(obs[idx])
                v_err = v - ret[idx]
                v_loss = cfg.value_coef * float(np.mean(v_err * v_err))
                if not np.isfinite(v_loss):
                    raise NonFiniteGradientError("non-finite value loss")
                upstream = (cfg.value_coef * 2.0 * v_err / len(idx))[:, None]
                vwg, vbg, _ = bundle.value.backward(obs[idx], upstream)
                vgrads = []
                for w, b in zip(vwg, vbg):
                    vgrads.append(w)
                    vgrads.append(b)
                _clip_grads(vgrads, cfg.max_grad_norm)
                adam_step(bundle.value.parameters(), vgrads, bundle.value_adam, lr)

                pi_losses.append(pi_loss)
                v_losses.append(v_loss)
                updates_applied += 1
    except NonFiniteGradientError:
        # roll parameters back and flag the epoch
        k = len(policy_params)
        for p, s in zip(policy_params, snapshot[:k]):
            p[...] = s
        bundle.value.set_parameters(snapshot[k:])
        return {
            "rolled_back": True,
            "policy_loss": float("nan"),
            "value_loss": float("nan"),
            "approx_kl": kl_history[-1] if kl_history else 0.0,
            "kl_history": kl_history,
            "updates_applied": 0,
            "early_stopped": False,
            "lr": lr,
        }

    return {
        "rolled_back": False,
        "policy_loss": float(np.mean(pi_losses)) if pi_losses else 0.0,
        "value_loss": float(np.mean(v_losses)) if v_losses else 0.0,
        "approx_kl": kl_history[-1] if kl_history else 0.0,
        "kl_history": kl_history,
        "updates_applied": updates_applied,
        "early_stopped": early_stopped,
        "lr": lr,
    }


# ------------------------------------------------------------------ training


@dataclass
class TrainResult:
    epochs_run: int
    telemetry_path: Path
    checkpoint_paths: list
    final_checkpoint: Path
    curriculum: CurriculumState


class Trainer:
    """collect -> advantage estimation -> update -> curriculum -> telemetry."""

    def __init__(self, model: RobotModel, env_cfg: EnvConfig, ppo_cfg: PPOConfig,
                 seed: int, out_dir, curriculum_cfg: CurriculumConfig | None = None,
                 run_meta: dict | None = None, use_curriculum: bool = True):
        self.model = model
        self.env_cfg = env_cfg
        self.ppo_cfg = ppo_cfg
        self.seed = seed
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.curriculum_cfg = curriculum_cfg or CurriculumConfig()
        self.use_curriculum = use_curriculum and env_cfg.terrain_kind == "flat"
        self.run_meta = run_meta or {}

        init_rng = np.random.default_rng(seed)
        self.bundle = PolicyBundle(ppo_cfg, init_rng)
        self.rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        self.env = BatchedLocomotionEnv(model, env_cfg, ppo_cfg.num_envs,
                                        seed=seed + 1)
        self.curriculum = CurriculumState(
            terrain_index=self.env.terrain_stage)
        self.start_epoch = 0
        self.adaptive_lr = ppo_cfg.lr_init

    # ------------------------------------------------------------ checkpoints

    def checkpoint_doc(self, epoch: int) -> dict:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "training",
            "epoch": epoch,
            "seed": self.seed,
            "config": dict(self.run_meta),
            "policy": net_to_doc(self.bundle.policy),
            "value": net_to_doc(self.bundle.value),
            "log_std": encode_array(self.bundle.head.log_std),
            "policy_adam": adam_to_doc(self.bundle.policy_adam,
                                       self.bundle._policy_params()),
            "value_adam": adam_to_doc(self.bundle.value_adam,
                                      self.bundle.value.parameters()),
            "curriculum": {
                "terrain_index": self.curriculum.terrain_index,
                "reward_ema": self.curriculum.reward_ema,
                "streak": self.curriculum.streak,
                "started": self.curriculum.started,
            },
            "adaptive_lr": self.adaptive_lr,
        }
        return doc

    def save_checkpoint(self, epoch: int) -> Path:
        path = self.out_dir / f"epoch_{epoch:06d}.ckpt"
        path.write_text(json.dumps(self.checkpoint_doc(epoch), sort_keys=True))
        return path

    def load_checkpoint(self, path) -> None:
        doc = json.loads(Path(path).read_text())
        if doc.get("kind") != "training":
            raise ValueError(f"{path} is not a training checkpoint")
        self.bundle.policy = net_from_doc(doc["policy"])
        self.bundle.value = net_from_doc(doc["value"])
        self.bundle.head.log_std = decode_array(doc["log_std"],
                                                (self.bundle.head.dim,))
        self.bundle.policy_adam = adam_from_doc(doc["policy_adam"])
        self.bundle.value_adam = adam_from_doc(doc["value_adam"])
        cur = doc["curriculum"]
        self.curriculum = CurriculumState(
            terrain_index=cur["terrain_index"], reward_ema=cur["reward_ema"],
            streak=cur["streak"], started=cur["started"])
        if self.curriculum.terrain_index > self.env.terrain_stage:
            self.env.set_terrain_stage(self.curriculum.terrain_index)
        self.start_epoch = int(doc["epoch"]) + 1
        self.adaptive_lr = float(doc.get("adaptive_lr", self.ppo_cfg.lr_init))

    # ------------------------------------------------------------ main loop

    def train(self, epochs: int | None = None, on_epoch=None) -> TrainResult:
        cfg = self.ppo_cfg
        end_epoch = self.start_epoch + (epochs if epochs is not None
                                        else cfg.total_epochs - self.start_epoch)
        telemetry_path = self.out_dir / "telemetry.csv"
        writer = TelemetryWriter(telemetry_path, append=self.start_epoch > 0)
        checkpoints = []
        obs = self.env.reset_all()
        epoch = self.start_epoch
        try:
            for epoch in range(self.start_epoch, end_epoch):
                buf, obs, roll_stats = collect(
                    self.bundle, self.env, obs, cfg.steps_per_env, cfg.gamma, self.rng)
                current_lr = self.adaptive_lr if cfg.kl_mode == "adaptive" else None
                stats = update(self.bundle, buf, cfg, epoch, self.rng, current_lr)
                if cfg.kl_mode == "adaptive":
                    self.adaptive_lr = stats["lr"]

                mean_reward = float(buf.rewards.mean())
                left, right = buf.side_counts()
                ratio, _ = symmetry_ratio(left, right)
                lengths = roll_stats["episode_lengths"]
                mean_len = float(np.mean(lengths)) if lengths else 0.0

                prev_index = self.curriculum.terrain_index
                if self.use_curriculum:
                    self.curriculum = advance_curriculum(
                        self.curriculum, mean_reward, self.curriculum_cfg)
                    if self.curriculum.terrain_index != prev_index:
                        self.env.set_terrain_stage(self.curriculum.terrain_index)
                        obs = self.env._observe()

                writer.append({
                    "epoch": epoch,
                    "steps": len(buf),
                    "mean_reward": mean_reward,
                    "mean_episode_len": mean_len,
                    "terrain_index": self.curriculum.terrain_index,
                    "left_count": left,
                    "right_count": right,
                    "ratio": ratio,
                    "approx_kl": stats["approx_kl"],
                    "lr": stats["lr"],
                })
                if on_epoch is not None:
                    on_epoch(epoch, mean_reward, stats)
                if cfg.checkpoint_every > 0 and (epoch + 1) % cfg.checkpoint_every == 0:
                    checkpoints.append(self.save_checkpoint(epoch))
        finally:
            writer.close()
        final = self.save_checkpoint(epoch)
        if not checkpoints or checkpoints[-1] != final:
            checkpoints.append(final)
        return TrainResult(
            epochs_run=epoch - self.start_epoch + 1,
            telemetry_path=telemetry_path,
            checkpoint_paths=checkpoints,
            final_checkpoint=final,
            curriculum=self.curriculum,
        )


def evaluate_mean_lv(policy: DenseNet, model: RobotModel, env_cfg: EnvConfig,
                     num_envs: int = 16, control_steps: int = 500,
                     seed: int = 10_000) -> float:
    """Mean per-step velocity-tracking term under the deterministic policy."""
    env = BatchedLocomotionEnv(model, env_cfg, num_envs, seed=seed)
    obs = env.reset_all()
    total, count = 0.0, 0
    for _ in range(control_steps):
        actions = policy.forward(obs)
        obs, _, _, info = env.step(actions)
        total += float(info["lv_terms"].sum())
        count += num_envs
    return total / count
