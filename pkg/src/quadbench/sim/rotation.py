"""Quaternion and rotation helpers, batched over a leading env axis.

Quaternions are (w, x, y, z), unit norm, mapping body to world:
v_world = R(q) @ v_body. All formulas are written as explicit component
arithmetic (no matmul) so that reflecting a state across the x-z plane
flips signs bit-exactly; the simulator's mirror-equivariance tests rely
on this.
"""
from __future__ import annotations

import numpy as np

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def normalize_quat(q: np.ndarray) -> np.ndarray:
    n = np.sqrt(np.sum(q * q, axis=-1, keepdims=True))
    return q / n


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Body-to-world rotation matrix, shape (..., 3, 3)."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    r = np.empty(q.shape[:-1] + (3, 3), dtype=np.float64)
    r[..., 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    r[..., 0, 1] = 2.0 * (x * y - w * z)
    r[..., 0, 2] = 2.0 * (x * z + w * y)
    r[..., 1, 0] = 2.0 * (x * y + w * z)
    r[..., 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    r[..., 1, 2] = 2.0 * (y * z - w * x)
    r[..., 2, 0] = 2.0 * (x * z - w * y)
    r[..., 2, 1] = 2.0 * (y * z + w * x)
    r[..., 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return r


def rotate(r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """R @ v with explicit component sums; r (..., 3, 3), v (..., 3)."""
    out = np.empty_like(v)
    for i in range(3):
        out[..., i] = (r[..., i, 0] * v[..., 0]
                       + r[..., i, 1] * v[..., 1]
                       + r[..., i, 2] * v[..., 2])
    return out


def rotate_inv(r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """R^T @ v (world to body)."""
    out = np.empty_like(v)
    for i in range(3):
        out[..., i] = (r[..., 0, i] * v[..., 0]
                       + r[..., 1, i] * v[..., 1]
                       + r[..., 2, i] * v[..., 2])
    return out


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast(a, b).shape, dtype=np.float64)
    out[..., 0] = aw * bw - ax * bx - ay * by - az * bz
    out[..., 1] = aw * bx + ax * bw + ay * bz - az * by
    out[..., 2] = aw * by - ax * bz + ay * bw + az * bx
    out[..., 3] = aw * bz + ax * by - ay * bx + az * bw
    return out


def integrate_quat(q: np.ndarray, omega_body: np.ndarray, h: float) -> np.ndarray:
    """First-order quaternion update q + h/2 * q (x) (0, w), renormalized."""
    ow = np.zeros(omega_body.shape[:-1] + (4,), dtype=np.float64)
    ow[..., 1:] = omega_body
    return normalize_quat(q + 0.5 * h * quat_multiply(q, ow))


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(np.broadcast(a, b).shape, dtype=np.float64)
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def mirror_quat(q: np.ndarray) -> np.ndarray:
    """Orientation reflected across the world x-z plane: (w, -x, y, -z)."""
    out = q.copy()
    out[..., 1] = -out[..., 1]
    out[..., 3] = -out[..., 3]
    return out


def gravity_in_body(q: np.ndarray) -> np.ndarray:
    """Unit gravity direction expressed in the body frame: R^T (0, 0, -1)."""
    r = quat_to_matrix(q)
    return -r[..., 2, :]


def quat_from_euler(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Intrinsic z-y-x euler angles to quaternion (right-handed axes)."""
    cr, sr = np.cos(roll / 2), np.sin(roll / 2)
    cp, sp = np.cos(pitch / 2), np.sin(pitch / 2)
    cy, sy = np.cos(yaw / 2), np.sin(yaw / 2)
    return np.array([
        cy * cp * cr + sy * sp * sr,
        cy * cp * sr - sy * sp * cr,
        cy * sp * cr + sy * cp * sr,
        sy * cp * cr - cy * sp * sr,
    ])


def yaw_of(q: np.ndarray) -> np.ndarray:
    """Heading angle of the body x axis projected to the world plane."""
    r = quat_to_matrix(q)
    return np.arctan2(r[..., 1, 0], r[..., 0, 0])


def roll_from_gravity(g_body: np.ndarray) -> np.ndarray:
    """Roll angle from the body-frame gravity direction.

    Positive roll = right side down: with +y pointing left, gravity tips
    toward -y when the body leans right, so roll = atan2(-g_y, -g_z).
    Level pose gives 0.
    """
    return np.arctan2(-g_body[..., 1], -g_body[..., 2])
