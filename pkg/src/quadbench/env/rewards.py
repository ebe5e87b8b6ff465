"""Reward suite: velocity-tracking aims plus stability/effort penalties.

Every term is even under left-right reflection, so the total reward is
mirror invariant; the training telemetry relies on that.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sim.rotation import gravity_in_body, quat_to_matrix
from ..sim.state import SimState

REWARD_TERM_NAMES = ("lv", "az", "lvp", "azp", "g", "tau", "collide", "ar")


@dataclass(frozen=True)
class RewardWeights:
    """Aim weights (lv, az) and penalty weights; defaults are the trained set."""

    lv: float = 1.0
    az: float = 0.5
    lvp: float = 3.0
    azp: float = 0.05
    g: float = 1.0
    tau: float = 5e-4
    collide: float = 0.25
    ar: float = 0.1


def reward_terms(prev: SimState, cur: SimState, tau, action, prev_action, cmd) -> dict:
    """The eight unweighted reward terms for one transition.

    All terms evaluate on the post-step state `cur`; `prev` is part of the
    transition record but unused by the current definitions.
    """
    v = cur.base_lin_vel
    w = cur.base_ang_vel
    ex, ey = v[0] - cmd.vx, v[1] - cmd.vy
    att = gravity_in_body(cur.base_quat)
    da = np.asarray(action) - np.asarray(prev_action)
    return {
        "lv": float(np.exp(-3.0 * np.hypot(ex, ey))),
        "az": float(np.exp(-3.0 * (w[2] - cmd.wz) ** 2)),
        "lvp": float(-v[2] ** 2),
        "azp": float(-(w[0] ** 2 + w[1] ** 2)),
        "g": float(-np.hypot(att[0], att[1])),
        "tau": float(-np.sum(np.abs(tau))),
        "collide": -1.0 if cur.knee_contact.any() else 0.0,
        "ar": float(-np.sqrt(np.sum(da * da))),
    }


def total_reward(terms: dict, weights: RewardWeights = RewardWeights()) -> float:
    """Weighted sum of the eight terms: aim part plus penalty part."""
    return (weights.lv * terms["lv"]
            + weights.az * terms["az"]
            + weights.lvp * terms["lvp"]
            + weights.azp * terms["azp"]
            + weights.g * terms["g"]
            + weights.tau * terms["tau"]
            + weights.collide * terms["collide"]
            + weights.ar * terms["ar"])


def reward_batch(batch, commands: np.ndarray, tau: np.ndarray,
                 actions: np.ndarray, prev_actions: np.ndarray,
                 weights: RewardWeights):
    """Vectorized rewards for a SimBatch; returns (total, lv_term) arrays."""
    r = quat_to_matrix(batch.quat)
    v = np.empty((batch.n, 3))
    for i in range(3):
        v[:, i] = (r[:, 0, i] * batch.vel_w[:, 0]
                   + r[:, 1, i] * batch.vel_w[:, 1]
                   + r[:, 2, i] * batch.vel_w[:, 2])
    w = batch.omega
    ex = v[:, 0] - commands[:, 0]
    ey = v[:, 1] - commands[:, 1]
    lv = np.exp(-3.0 * np.hypot(ex, ey))
    az = np.exp(-3.0 * (w[:, 2] - commands[:, 2]) ** 2)
    lvp = -v[:, 2] ** 2
    azp = -(w[:, 0] ** 2 + w[:, 1] ** 2)
    g = -np.hypot(r[:, 2, 0], r[:, 2, 1])   # |(R^T e_g)_xy| = |(row 2)_xy|
    tau_term = -np.sum(np.abs(tau), axis=1)
    collide = np.where(batch.knee_contact.any(axis=1), -1.0, 0.0)
    da = actions - prev_actions
    ar = -np.sqrt(np.sum(da * da, axis=1))
    total = (weights.lv * lv + weights.az * az + weights.lvp * lvp
             + weights.azp * azp + weights.g * g + weights.tau * tau_term
             + weights.collide * collide + weights.ar * ar)
    return total, lv
