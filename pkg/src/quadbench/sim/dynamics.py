"""Floating-base dynamics with penalty contact, batched over envs.

Torque-level stepping with semi-implicit Euler at dt/substeps. The base
integrates explicitly (it is heavy enough for the contact damping rates).
The light leg chain would be unstable under explicit contact damping at
practical step sizes, so the damping's dependence on the joint rates is
folded in implicitly: each leg solves a 3x3 system (I + h*C) dw = h*tau
per micro step, with C the contact damping projected into joint space.
The solve uses the closed-form adjugate so that left/right legs remain
bit-exact mirrors; all force sums combine mirror pairs first for the same
reason.
"""
from __future__ import annotations

import numpy as np

from .kinematics import joint_point_velocity, joint_torque_from_force, leg_geometry
from .model import RobotModel
from .rotation import cross, integrate_quat, quat_to_matrix, rotate, rotate_inv
from .state import SimBatch, SimState
from .terrain import Terrain, TerrainBatch


class SimulationDivergedError(RuntimeError):
    """A step produced non-finite state; carries the offending state."""

    def __init__(self, state):
        super().__init__("simulation diverged: non-finite state after step")
        self.state = state


def drive_map(action, theta, theta_dot, model: RobotModel):
    """Joint torques from the policy output: kp(a + theta0 - theta) - kd w,
    clamped to +-tau_max."""
    tau = model.kp * (action + model.theta0 - theta) - model.kd * theta_dot
    return np.clip(tau, -model.tau_max, model.tau_max)


def drive_map_arrays(action, theta, theta_dot, theta0, kp, kd, tau_max):
    """Batched drive mapping with per-env gains; kp/kd broadcast as (N, 1)."""
    tau = kp * (action + theta0 - theta) - kd * theta_dot
    return np.clip(tau, -tau_max, tau_max)


def _corner_points(half_extents) -> np.ndarray:
    """Body box corners ordered as adjacent left/right mirror pairs."""
    bx, by, bz = half_extents
    pts = []
    for sx in (1.0, -1.0):
        for sz in (1.0, -1.0):
            pts.append((sx * bx, by, sz * bz))
            pts.append((sx * bx, -by, sz * bz))
    return np.array(pts)


class ModelArrays:
    """Per-env physical parameters for a batch; geometry stays shared."""

    def __init__(self, model: RobotModel, n: int):
        self.base = model
        self.n = n
        self.kp = np.full(n, model.kp)
        self.kd = np.full(n, model.kd)
        self.friction = np.full(n, model.foot_friction)
        self.inv_mass = np.full(n, 1.0 / model.body_mass)
        self.inertia = np.tile(np.asarray(model.body_inertia), (n, 1))
        self.inv_inertia = 1.0 / self.inertia
        self.joint_inertia = np.tile(np.asarray(model.joint_inertia), (n, 1))  # (n, 3)
        self.corners = _corner_points(model.body_half_extents)
        self.probe_radius = np.concatenate([
            np.full(4, model.foot_radius),
            np.full(4, model.knee_radius),
            np.full(8, 0.02),
        ])

    def set_env_scales(self, i: int, friction_scale=1.0, mass_scale=1.0,
                       kp_scale=1.0, kd_scale=1.0) -> None:
        m = self.base
        self.kp[i] = m.kp * kp_scale
        self.kd[i] = m.kd * kd_scale
        self.friction[i] = m.foot_friction * friction_scale
        self.inv_mass[i] = 1.0 / (m.body_mass * mass_scale)
        self.inertia[i] = np.asarray(m.body_inertia) * mass_scale
        self.inv_inertia[i] = 1.0 / self.inertia[i]
        # point masses scale linearly, so the derived joint inertias do too
        self.joint_inertia[i] = np.asarray(m.joint_inertia) * mass_scale


def _solve_sym3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve symmetric positive definite 3x3 systems by the adjugate formula.

    a has shape (..., 3, 3), b (..., 3). Pure arithmetic (no pivoting) keeps
    mirrored systems bit-exact mirrors of each other.
    """
    a00, a01, a02 = a[..., 0, 0], a[..., 0, 1], a[..., 0, 2]
    a11, a12, a22 = a[..., 1, 1], a[..., 1, 2], a[..., 2, 2]
    c00 = a11 * a22 - a12 * a12
    c01 = a02 * a12 - a01 * a22
    c02 = a01 * a12 - a02 * a11
    c11 = a00 * a22 - a02 * a02
    c12 = a01 * a02 - a00 * a12
    c22 = a00 * a11 - a01 * a01
    det = a00 * c00 + a01 * c01 + a02 * c02
    out = np.empty_like(b)
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out[..., 0] = (c00 * b0 + c01 * b1 + c02 * b2) / det
    out[..., 1] = (c01 * b0 + c11 * b1 + c12 * b2) / det
    out[..., 2] = (c02 * b0 + c12 * b1 + c22 * b2) / det
    return out


def _micro_step(batch: SimBatch, tau: np.ndarray, tb: TerrainBatch,
                h: float, ma: ModelArrays, r: np.ndarray,
                touch: np.ndarray) -> np.ndarray:
    """One semi-implicit micro step; returns the rotation of the new state."""
    model = ma.base
    n = batch.n
    geo = leg_geometry(model, batch.theta)

    probes = np.empty((n, 16, 3))
    probes[:, 0:4] = geo.foot_pos
    probes[:, 4:8] = geo.knee_pos
    probes[:, 8:16] = ma.corners

    rates = batch.theta_dot.reshape(n, 4, 3)
    v_joint = np.zeros((n, 16, 3))
    v_joint[:, 0:4] = joint_point_velocity(geo.jac_foot, rates)
    v_joint[:, 4:8] = joint_point_velocity(geo.jac_knee, rates)

    r_b = r[:, None, :, :]
    pw = batch.pos[:, None, :] + rotate(r_b, probes)
    z, gx, gy = tb.sample(pw[..., 0], pw[..., 1])
    depth = z + ma.probe_radius - pw[..., 2]
    in_contact = depth > 0.0
    touch |= in_contact

    if tb.flat:
        normal = np.zeros((n, 16, 3))
        normal[..., 2] = 1.0
    else:
        normal = np.empty((n, 16, 3))
        inv_len = 1.0 / np.sqrt(gx * gx + gy * gy + 1.0)
        normal[..., 0] = -gx * inv_len
        normal[..., 1] = -gy * inv_len
        normal[..., 2] = inv_len

    v_pw = batch.vel_w[:, None, :] + rotate(
        r_b, cross(batch.omega[:, None, :], probes) + v_joint)
    vn = np.sum(v_pw * normal, axis=-1)
    fn = np.where(
        in_contact,
        np.maximum(0.0, model.contact_stiffness * depth - model.contact_damping * vn),
        0.0,
    )
    vt = v_pw - vn[..., None] * normal
    ft = -model.tangent_damping * vt
    ft_mag = np.sqrt(np.sum(ft * ft, axis=-1))
    cap = ma.friction[:, None] * fn
    scale = np.minimum(1.0, cap / np.maximum(ft_mag, 1e-12))
    f_w = fn[..., None] * normal + ft * scale[..., None]

    f_b = rotate_inv(r_b, f_w)
    torque_terms = cross(probes, f_b)
    # sum left/right mirror pairs first: swapping pair members commutes
    # bit-exactly, which keeps mirrored rollouts identical on flat ground
    f_sum = (f_w[:, 0::2] + f_w[:, 1::2]).sum(axis=1)
    torque_b = (torque_terms[:, 0::2] + torque_terms[:, 1::2]).sum(axis=1)

    tau_joint = tau.reshape(n, 4, 3) + (
        joint_torque_from_force(geo.jac_foot, f_b[:, 0:4])
        + joint_torque_from_force(geo.jac_knee, f_b[:, 4:8]))

    # base: explicit semi-implicit update (velocities, then positions)
    acc = f_sum * ma.inv_mass[:, None]
    acc[:, 2] -= model.gravity
    batch.vel_w += h * acc
    batch.pos += h * batch.vel_w

    i_omega = ma.inertia * batch.omega
    gyro = cross(batch.omega, i_omega)
    batch.omega += h * (torque_b - gyro) * ma.inv_inertia
    batch.quat[...] = integrate_quat(batch.quat, batch.omega, h)

    # legs: contact damping folded in implicitly per leg. World-frame
    # Jacobians G = R J; damping in joint space is
    # C = ct * G^T G + (cn - ct) * (n^T G)^T (n^T G), per contacting probe.
    active = fn > 0.0
    g_foot = np.einsum("nik,nlkj->nlij", r, geo.jac_foot)
    g_knee = np.einsum("nik,nlkj->nlij", r, geo.jac_knee)
    cn, ct = model.contact_damping, model.tangent_damping
    a_sys = np.zeros((n, 4, 3, 3))
    for g, sel in ((g_foot, slice(0, 4)), (g_knee, slice(4, 8))):
        gate = active[:, sel].astype(np.float64)[..., None]
        an = np.einsum("nli,nlij->nlj", normal[:, sel], g) * gate
        gg = np.einsum("nlki,nlkj->nlij", g * gate[..., None], g)
        a_sys += ct * gg + (cn - ct) * np.einsum("nli,nlj->nlij", an, an)
    a_sys *= h
    for j in range(3):
        a_sys[:, :, j, j] += ma.joint_inertia[:, j][:, None]
    d_rates = _solve_sym3(a_sys, h * tau_joint)
    batch.theta_dot += d_rates.reshape(n, 12)
    batch.theta += h * batch.theta_dot
    return quat_to_matrix(batch.quat)


def step_batch(batch: SimBatch, tau: np.ndarray, tb: TerrainBatch,
               dt: float, ma: ModelArrays) -> np.ndarray:
    """Advance every env by dt; mutates batch, returns per-env diverged mask."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    substeps = ma.base.substeps
    h = dt / substeps
    touch = np.zeros((batch.n, 16), dtype=bool)
    r = quat_to_matrix(batch.quat)
    for _ in range(substeps):
        r = _micro_step(batch, tau, tb, h, ma, r, touch)
    batch.time += dt
    batch.foot_contact[...] = touch[:, 0:4]
    batch.knee_contact[...] = touch[:, 4:8]
    batch.body_contact[...] = touch[:, 8:16].any(axis=1)
    return ~batch.finite_mask()


def step(state: SimState, tau, terrain: Terrain, dt: float,
         model: RobotModel) -> SimState:
    """Single-robot step; pure function of its inputs."""
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (12,):
        raise ValueError(f"tau must be a 12-vector, got shape {tau.shape}")
    batch = SimBatch.from_states([state])
    ma = ModelArrays(model, 1)
    diverged = step_batch(batch, tau[None, :], TerrainBatch([terrain]), dt, ma)
    out = batch.state(0)
    if diverged[0]:
        raise SimulationDivergedError(out)
    return out
