"""Per-epoch training telemetry: CSV schema and the left/right sample ratio."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TELEMETRY_COLUMNS = [
    "epoch", "steps", "mean_reward", "mean_episode_len", "terrain_index",
    "left_count", "right_count", "ratio", "approx_kl", "lr",
]


def symmetry_ratio(left_count: int, right_count: int):
    """left/right sample ratio; right == 0 reports an inf sentinel + flag."""
    if left_count < 0 or right_count < 0:
        raise ValueError("counts must be non-negative")
    if right_count == 0:
        return float("inf"), True
    return left_count / right_count, False


class TelemetryWriter:
    """Appends telemetry rows; float formatting via repr for byte-stable output."""

    def __init__(self, path, append: bool = False):
        self.path = Path(path)
        mode = "a" if append and self.path.exists() else "w"
        self._file = open(self.path, mode, newline="")
        self._writer = csv.writer(self._file)
        if mode == "w":
            self._writer.writerow(TELEMETRY_COLUMNS)

    def append(self, row: dict) -> None:
        out = []
        for col in TELEMETRY_COLUMNS:
            v = row[col]
            if isinstance(v, (int, np.integer)):
                out.append(str(int(v)))
            else:
                out.append(repr(float(v)))
        self._writer.writerow(out)
        self._file.flush()

    def close(self) -> None:
        self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_telemetry(path) -> dict:
    """Telemetry CSV back as a dict of float arrays ('inf' parses fine)."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in r] for r in reader]
    data = np.array(rows) if rows else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}
