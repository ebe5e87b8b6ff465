"""Per-leg forward kinematics and Jacobians, batched over envs and legs.

Joint order per leg: hip abduction (about body x), hip flexion (about the
abducted y axis), knee. All legs evaluate through the side-folded abduction
angle beta = side * alpha, so a mirrored joint configuration runs the same
arithmetic on sign-flipped values; the simulator's mirror-equivariance
guarantee rests on the resulting bit-exactness.
"""
from __future__ import annotations

import numpy as np

from .model import LEG_X_SIGN, LEG_Y_SIGN, RobotModel


class LegGeometry:
    """FK arrays: knee_pos/foot_pos (N, 4, 3) body frame; jac_foot/jac_knee
    (N, 4, 3, 3) with columns ordered (abduction, hip, knee)."""

    __slots__ = ("knee_pos", "foot_pos", "jac_foot", "jac_knee")

    def __init__(self, n: int):
        self.knee_pos = np.empty((n, 4, 3))
        self.foot_pos = np.empty((n, 4, 3))
        self.jac_foot = np.zeros((n, 4, 3, 3))
        self.jac_knee = np.zeros((n, 4, 3, 3))


def leg_geometry(model: RobotModel, theta: np.ndarray) -> LegGeometry:
    """Evaluate FK for theta of shape (N, 12); legs vectorized as (N, 4)."""
    n = theta.shape[0]
    geo = LegGeometry(n)
    lt, ls, d = model.thigh_length, model.shank_length, model.abduction_offset
    hy = model.hip_half_spacing
    s = LEG_Y_SIGN                      # (4,) broadcast over envs
    hx = LEG_X_SIGN * model.hip_x

    joints = theta.reshape(n, 4, 3)
    beta = s * joints[:, :, 0]
    phi = joints[:, :, 1]
    psi = phi + joints[:, :, 2]
    sb, cb = np.sin(beta), np.cos(beta)
    sp, cp = np.sin(phi), np.cos(phi)
    sq, cq = np.sin(psi), np.cos(psi)

    xt = -lt * sp                       # sagittal thigh extent
    zt = -lt * cp
    x = xt - ls * sq                    # sagittal foot extent
    z = zt - ls * cq
    dcb = d * cb
    dsb = d * sb

    geo.knee_pos[:, :, 0] = hx + xt
    geo.knee_pos[:, :, 1] = s * (hy + dcb - zt * sb)
    geo.knee_pos[:, :, 2] = zt * cb + dsb
    geo.foot_pos[:, :, 0] = hx + x
    geo.foot_pos[:, :, 1] = s * (hy + dcb - z * sb)
    geo.foot_pos[:, :, 2] = z * cb + dsb

    jf = geo.jac_foot
    jf[:, :, 1, 0] = -(dsb + z * cb)    # d foot / d abduction
    jf[:, :, 2, 0] = s * (dcb - z * sb)
    jf[:, :, 0, 1] = z                  # d foot / d hip flexion
    jf[:, :, 1, 1] = s * (x * sb)
    jf[:, :, 2, 1] = -x * cb
    jf[:, :, 0, 2] = -ls * cq           # d foot / d knee
    jf[:, :, 1, 2] = s * (-ls * sq * sb)
    jf[:, :, 2, 2] = ls * sq * cb

    jk = geo.jac_knee
    jk[:, :, 1, 0] = -(dsb + zt * cb)
    jk[:, :, 2, 0] = s * (dcb - zt * sb)
    jk[:, :, 0, 1] = zt
    jk[:, :, 1, 1] = s * (xt * sb)
    jk[:, :, 2, 1] = -xt * cb
    # knee column of jac_knee stays zero: the knee point does not move with
    # its own joint
    return geo


def joint_point_velocity(jac: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """J @ theta_dot with explicit sums; jac (..., 3, 3), rates (..., 3)."""
    out = np.empty_like(rates)
    for i in range(3):
        out[..., i] = (jac[..., i, 0] * rates[..., 0]
                       + jac[..., i, 1] * rates[..., 1]
                       + jac[..., i, 2] * rates[..., 2])
    return out


def joint_torque_from_force(jac: np.ndarray, force_body: np.ndarray) -> np.ndarray:
    """J^T @ f with explicit sums; returns joint torques per leg."""
    out = np.empty_like(force_body)
    for j in range(3):
        out[..., j] = (jac[..., 0, j] * force_body[..., 0]
                       + jac[..., 1, j] * force_body[..., 1]
                       + jac[..., 2, j] * force_body[..., 2])
    return out
