"""Simulator state: single-robot value type and the batched array form."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import NUM_JOINTS, RobotModel
from .rotation import mirror_quat
from .terrain import Terrain, terrain_height

# left-right reflection of the 12 joints: FL<->FR, RL<->RR with the
# abduction angle negated (flexion and knee are mirror-even)
JOINT_MIRROR_PERM = np.array([3, 4, 5, 0, 1, 2, 9, 10, 11, 6, 7, 8])
JOINT_MIRROR_SIGN = np.tile(np.array([-1.0, 1.0, 1.0]), 4)
LEG_MIRROR_PERM = np.array([1, 0, 3, 2])


def mirror_joint_vector(v: np.ndarray) -> np.ndarray:
    """Apply the leg swap + abduction sign flip to a 12-entry joint vector."""
    return JOINT_MIRROR_SIGN * v[..., JOINT_MIRROR_PERM]


@dataclass
class SimState:
    """Floating-base state. Velocities are in the body frame."""

    base_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    base_quat: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    base_lin_vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    base_ang_vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    theta_dot: np.ndarray = field(default_factory=lambda: np.zeros(NUM_JOINTS))
    foot_contact: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=bool))
    knee_contact: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=bool))
    body_contact: bool = False
    sim_time: float = 0.0

    def __post_init__(self):
        for name in ("base_position", "base_quat", "base_lin_vel", "base_ang_vel",
                     "theta", "theta_dot"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        self.foot_contact = np.asarray(self.foot_contact, dtype=bool)
        self.knee_contact = np.asarray(self.knee_contact, dtype=bool)

    def copy(self) -> "SimState":
        return SimState(
            base_position=self.base_position.copy(),
            base_quat=self.base_quat.copy(),
            base_lin_vel=self.base_lin_vel.copy(),
            base_ang_vel=self.base_ang_vel.copy(),
            theta=self.theta.copy(),
            theta_dot=self.theta_dot.copy(),
            foot_contact=self.foot_contact.copy(),
            knee_contact=self.knee_contact.copy(),
            body_contact=self.body_contact,
            sim_time=self.sim_time,
        )

    def is_finite(self) -> bool:
        return all(
            np.all(np.isfinite(getattr(self, n)))
            for n in ("base_position", "base_quat", "base_lin_vel",
                      "base_ang_vel", "theta", "theta_dot")
        )

    def quat_norm_error(self) -> float:
        return abs(float(np.linalg.norm(self.base_quat)) - 1.0)


def default_state(model: RobotModel, terrain: Terrain | None = None,
                  xy=(0.0, 0.0), yaw: float = 0.0,
                  spawn_height: float = 0.30) -> SimState:
    """Reset pose: default joints, base spawn_height above the local terrain."""
    from .rotation import quat_from_euler

    ground = 0.0 if terrain is None else terrain_height(terrain, xy[0], xy[1])
    return SimState(
        base_position=np.array([xy[0], xy[1], ground + spawn_height]),
        base_quat=quat_from_euler(0.0, 0.0, yaw),
        theta=model.theta0.copy(),
    )


def mirror_sim_state(s: SimState) -> SimState:
    """Reflect the full state across the world x-z plane (an involution)."""
    pos = s.base_position.copy()
    pos[1] = -pos[1]
    lin = s.base_lin_vel.copy()
    lin[1] = -lin[1]
    ang = s.base_ang_vel.copy()
    ang[0] = -ang[0]
    ang[2] = -ang[2]
    return SimState(
        base_position=pos,
        base_quat=mirror_quat(s.base_quat),
        base_lin_vel=lin,
        base_ang_vel=ang,
        theta=mirror_joint_vector(s.theta),
        theta_dot=mirror_joint_vector(s.theta_dot),
        foot_contact=s.foot_contact[LEG_MIRROR_PERM],
        knee_contact=s.knee_contact[LEG_MIRROR_PERM],
        body_contact=s.body_contact,
        sim_time=s.sim_time,
    )


class SimBatch:
    """Struct-of-arrays state for N robots stepped together.

    Linear velocity is stored in the world frame internally (the integrator
    works there); conversions to the body-frame SimState contract happen at
    the state()/set_state() boundary.
    """

    __slots__ = ("n", "pos", "quat", "vel_w", "omega", "theta", "theta_dot",
                 "foot_contact", "knee_contact", "body_contact", "time")

    def __init__(self, n: int):
        self.n = n
        self.pos = np.zeros((n, 3))
        self.quat = np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (n, 1))
        self.vel_w = np.zeros((n, 3))
        self.omega = np.zeros((n, 3))
        self.theta = np.zeros((n, NUM_JOINTS))
        self.theta_dot = np.zeros((n, NUM_JOINTS))
        self.foot_contact = np.zeros((n, 4), dtype=bool)
        self.knee_contact = np.zeros((n, 4), dtype=bool)
        self.body_contact = np.zeros(n, dtype=bool)
        self.time = np.zeros(n)

    @classmethod
    def from_states(cls, states) -> "SimBatch":
        batch = cls(len(states))
        for i, s in enumerate(states):
            batch.set_state(i, s)
        return batch

    def set_state(self, i: int, s: SimState) -> None:
        from .rotation import quat_to_matrix, rotate

        self.pos[i] = s.base_position
        self.quat[i] = s.base_quat
        self.vel_w[i] = rotate(quat_to_matrix(s.base_quat), s.base_lin_vel)
        self.omega[i] = s.base_ang_vel
        self.theta[i] = s.theta
        self.theta_dot[i] = s.theta_dot
        self.foot_contact[i] = s.foot_contact
        self.knee_contact[i] = s.knee_contact
        self.body_contact[i] = s.body_contact
        self.time[i] = s.sim_time

    def lin_vel_body(self) -> np.ndarray:
        from .rotation import quat_to_matrix, rotate_inv

        return rotate_inv(quat_to_matrix(self.quat), self.vel_w)

    def state(self, i: int) -> SimState:
        from .rotation import quat_to_matrix, rotate_inv

        return SimState(
            base_position=self.pos[i].copy(),
            base_quat=self.quat[i].copy(),
            base_lin_vel=rotate_inv(quat_to_matrix(self.quat[i]), self.vel_w[i]),
            base_ang_vel=self.omega[i].copy(),
            theta=self.theta[i].copy(),
            theta_dot=self.theta_dot[i].copy(),
            foot_contact=self.foot_contact[i].copy(),
            knee_contact=self.knee_contact[i].copy(),
            body_contact=bool(self.body_contact[i]),
            sim_time=float(self.time[i]),
        )

    def finite_mask(self) -> np.ndarray:
        """True where every state entry of the row is finite."""
        ok = np.isfinite(self.pos).all(axis=1)
        ok &= np.isfinite(self.quat).all(axis=1)
        ok &= np.isfinite(self.vel_w).all(axis=1)
        ok &= np.isfinite(self.omega).all(axis=1)
        ok &= np.isfinite(self.theta).all(axis=1)
        ok &= np.isfinite(self.theta_dot).all(axis=1)
        return ok
