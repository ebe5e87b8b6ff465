"""The 48-entry proprioceptive observation and its canonical layout."""
from __future__ import annotations

import numpy as np

from ..sim.rotation import quat_to_matrix, rotate_inv
from ..sim.state import SimBatch, SimState

OBS_DIM = 48

# canonical layout (fixed contract; the mirror maps depend on it)
LIN_VEL = slice(0, 3)        # body-frame linear velocity, m/s
ANG_VEL = slice(3, 6)        # body-frame angular speed, rad/s
COMMAND = slice(6, 9)        # (v_cx, v_cy, w_cz)
ATTITUDE = slice(9, 12)      # gravity direction in the body frame, unit norm
JOINT_POS = slice(12, 24)    # rad
JOINT_VEL = slice(24, 36)    # rad/s
LAST_ACTION = slice(36, 48)  # previous policy output

BLOCK_SLICES = {
    "lin_vel": LIN_VEL,
    "ang_vel": ANG_VEL,
    "command": COMMAND,
    "attitude": ATTITUDE,
    "joint_pos": JOINT_POS,
    "joint_vel": JOINT_VEL,
    "last_action": LAST_ACTION,
}


def observe(state: SimState, cmd, last_action: np.ndarray) -> np.ndarray:
    """Assemble the 48 observation entries in canonical order."""
    out = np.empty(OBS_DIM)
    out[LIN_VEL] = state.base_lin_vel
    out[ANG_VEL] = state.base_ang_vel
    out[COMMAND] = (cmd.vx, cmd.vy, cmd.wz)
    r = quat_to_matrix(state.base_quat)
    out[ATTITUDE] = -r[2, :]   # R^T (0, 0, -1)
    out[JOINT_POS] = state.theta
    out[JOINT_VEL] = state.theta_dot
    out[LAST_ACTION] = last_action
    return out


def observe_batch(batch: SimBatch, commands: np.ndarray,
                  last_actions: np.ndarray) -> np.ndarray:
    """Vectorized observation for every env row of a batch."""
    r = quat_to_matrix(batch.quat)
    out = np.empty((batch.n, OBS_DIM))
    out[:, LIN_VEL] = rotate_inv(r, batch.vel_w)
    out[:, ANG_VEL] = batch.omega
    out[:, COMMAND] = commands
    out[:, ATTITUDE] = -r[:, 2, :]
    out[:, JOINT_POS] = batch.theta
    out[:, JOINT_VEL] = batch.theta_dot
    out[:, LAST_ACTION] = last_actions
    return out
