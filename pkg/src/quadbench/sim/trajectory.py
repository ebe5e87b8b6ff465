"""CSV trajectory dumps for offline inspection."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = (
    ["time", "pos_x", "pos_y", "pos_z", "quat_w", "quat_x", "quat_y", "quat_z",
     "vel_x", "vel_y", "vel_z", "omega_x", "omega_y", "omega_z"]
    + [f"theta_{i}" for i in range(12)]
    + [f"tau_{i}" for i in range(12)]
    + [f"foot_contact_{i}" for i in range(4)]
    + [f"knee_contact_{i}" for i in range(4)]
    + ["body_contact"]
)


class TrajectoryWriter:
    """Streams (state, tau) rows to an RFC-4180 style CSV file."""

    def __init__(self, path):
        self._file = open(path, "w", newline="")
        self._writer = csv.writer(self._file)
        self._writer.writerow(TRAJECTORY_COLUMNS)

    def append(self, state, tau) -> None:
        tau = np.asarray(tau)
        row = ([repr(state.sim_time)]
               + [repr(v) for v in state.base_position]
               + [repr(v) for v in state.base_quat]
               + [repr(v) for v in state.base_lin_vel]
               + [repr(v) for v in state.base_ang_vel]
               + [repr(v) for v in state.theta]
               + [repr(float(v)) for v in tau]
               + [str(int(v)) for v in state.foot_contact]
               + [str(int(v)) for v in state.knee_contact]
               + [str(int(state.body_contact))])
        self._writer.writerow(row)

    def close(self) -> None:
        self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def dump_trajectory(path, states, taus) -> None:
    with TrajectoryWriter(path) as w:
        for s, t in zip(states, taus):
            w.append(s, t)


def load_trajectory(path):
    """Read a trajectory CSV back as a dict of float arrays."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows) if rows else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}
