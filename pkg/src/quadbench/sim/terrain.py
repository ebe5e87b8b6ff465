"""Heightfield terrains: flat ground, bounded random slopes, 5 cm steps."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TERRAIN_KINDS = ("flat", "slopes", "steps")
STEP_HEIGHT = 0.05
MAX_SLOPE_DEG = 15.0

_MAGIC = b"QBTR"
_VERSION = 1


@dataclass
class Terrain:
    kind: str
    cell_size: float = 0.1
    heights: np.ndarray | None = None   # (H, W), axis 0 along x, axis 1 along y
    origin: tuple = (0.0, 0.0)          # world (x, y) of grid node [0, 0]
    seed: int = 0

    def __post_init__(self):
        if self.kind not in TERRAIN_KINDS:
            raise ValueError(f"unknown terrain kind {self.kind!r}")
        if self.kind != "flat":
            if self.heights is None:
                raise ValueError(f"{self.kind} terrain needs a heightfield")
            self.heights = np.asarray(self.heights, dtype=np.float64)

    @property
    def is_flat(self) -> bool:
        return self.heights is None


def flat_terrain() -> Terrain:
    return Terrain(kind="flat")


def _bilinear_upsample(coarse: np.ndarray, factor: int) -> np.ndarray:
    """Upsample a coarse grid by linear interpolation along both axes."""
    h, w = coarse.shape
    xs = np.arange((h - 1) * factor + 1) / factor
    ys = np.arange((w - 1) * factor + 1) / factor
    i = np.minimum(xs.astype(int), h - 2)
    j = np.minimum(ys.astype(int), w - 2)
    fx = (xs - i)[:, None]
    fy = (ys - j)[None, :]
    c00 = coarse[np.ix_(i, j)]
    c10 = coarse[np.ix_(i + 1, j)]
    c01 = coarse[np.ix_(i, j + 1)]
    c11 = coarse[np.ix_(i + 1, j + 1)]
    return (c00 * (1 - fx) * (1 - fy) + c10 * fx * (1 - fy)
            + c01 * (1 - fx) * fy + c11 * fx * fy)


def _max_bilinear_gradient(heights: np.ndarray, cell: float) -> float:
    """Upper bound of |grad| over the bilinear surface (cell-edge slopes)."""
    dx = np.abs(np.diff(heights, axis=0)) / cell
    dy = np.abs(np.diff(heights, axis=1)) / cell
    gx = np.maximum(dx[:, :-1], dx[:, 1:])   # per cell, worst of the two x-edges
    gy = np.maximum(dy[:-1, :], dy[1:, :])
    return float(np.max(np.hypot(gx, gy)))


def slopes_terrain(seed: int, extent: float = 20.0, cell_size: float = 0.1,
                   max_slope_deg: float = MAX_SLOPE_DEG, patch_cells: int = 8) -> Terrain:
    """Continuously varying slopes, gradient magnitude capped at tan(max_slope)."""
    rng = np.random.default_rng(seed)
    n = int(round(extent / cell_size)) + 1
    coarse_n = (n - 1) // patch_cells + 2
    coarse = rng.standard_normal((coarse_n, coarse_n))
    field = _bilinear_upsample(coarse, patch_cells)[:n, :n]
    gmax = _max_bilinear_gradient(field, cell_size)
    target = np.tan(np.radians(max_slope_deg)) * 0.999
    field *= target / gmax
    field -= field[n // 2, n // 2]   # spawn point at height 0
    origin = (-extent / 2.0, -extent / 2.0)
    return Terrain(kind="slopes", cell_size=cell_size, heights=field,
                   origin=origin, seed=seed)


def steps_terrain(seed: int, extent: float = 20.0, cell_size: float = 0.05,
                  step_height: float = STEP_HEIGHT, plateau_cells: int = 8) -> Terrain:
    """Irregular plateaus whose neighbours differ by exactly one step height."""
    rng = np.random.default_rng(seed)
    n = int(round(extent / cell_size)) + 1
    coarse_n = n // plateau_cells + 2
    # row/column random walks; their sum changes by at most 1 level between
    # adjacent plateaus in either grid direction
    r = np.cumsum(rng.integers(-1, 2, size=coarse_n))
    c = np.cumsum(rng.integers(-1, 2, size=coarse_n))
    levels = r[:, None] + c[None, :]
    fine = np.repeat(np.repeat(levels, plateau_cells, axis=0), plateau_cells, axis=1)
    fine = fine[:n, :n].astype(np.float64)
    center = fine[n // 2, n // 2]
    field = (fine - center) * step_height
    origin = (-extent / 2.0, -extent / 2.0)
    return Terrain(kind="steps", cell_size=cell_size, heights=field,
                   origin=origin, seed=seed)


def make_terrain(kind: str, seed: int = 0, **kwargs) -> Terrain:
    if kind == "flat":
        return flat_terrain()
    if kind == "slopes":
        return slopes_terrain(seed, **kwargs)
    if kind == "steps":
        return steps_terrain(seed, **kwargs)
    raise ValueError(f"unknown terrain kind {kind!r}")


class TerrainBatch:
    """Per-env terrains stacked for vectorized sampling.

    All members must share grid shape, cell size and origin (they differ only
    by seed), or all be flat.
    """

    def __init__(self, terrains):
        self.terrains = list(terrains)
        first = self.terrains[0]
        self.flat = all(t.is_flat for t in self.terrains)
        if not self.flat:
            if any(t.is_flat for t in self.terrains):
                raise ValueError("cannot mix flat and heightfield terrains in one batch")
            shapes = {t.heights.shape for t in self.terrains}
            cells = {t.cell_size for t in self.terrains}
            origins = {t.origin for t in self.terrains}
            if len(shapes) != 1 or len(cells) != 1 or len(origins) != 1:
                raise ValueError("batched terrains must share shape, cell size and origin")
            self.heights = np.stack([t.heights for t in self.terrains])
            self.cell_size = first.cell_size
            self.origin = first.origin

    def __len__(self):
        return len(self.terrains)

    def sample(self, x: np.ndarray, y: np.ndarray):
        """Bilinear height and gradient at world (x, y); shapes (N, ...)."""
        if self.flat:
            z = np.zeros_like(x)
            return z, np.zeros_like(x), np.zeros_like(x)
        n, hgrid, wgrid = self.heights.shape
        cell = self.cell_size
        u = np.clip((x - self.origin[0]) / cell, 0.0, hgrid - 1.0)
        v = np.clip((y - self.origin[1]) / cell, 0.0, wgrid - 1.0)
        i = np.minimum(u.astype(np.int64), hgrid - 2)
        j = np.minimum(v.astype(np.int64), wgrid - 2)
        fx = u - i
        fy = v - j
        env = np.arange(n).reshape((n,) + (1,) * (x.ndim - 1))
        h00 = self.heights[env, i, j]
        h10 = self.heights[env, i + 1, j]
        h01 = self.heights[env, i, j + 1]
        h11 = self.heights[env, i + 1, j + 1]
        z = (h00 * (1 - fx) * (1 - fy) + h10 * fx * (1 - fy)
             + h01 * (1 - fx) * fy + h11 * fx * fy)
        gx = ((h10 - h00) * (1 - fy) + (h11 - h01) * fy) / cell
        gy = ((h01 - h00) * (1 - fx) + (h11 - h10) * fx) / cell
        return z, gx, gy


def terrain_height(terrain: Terrain, x, y):
    """Bilinear height sample; flat terrain is identically zero."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    scalar = x.ndim == 0
    tb = TerrainBatch([terrain])
    z, _, _ = tb.sample(x.reshape(1, -1), y.reshape(1, -1))
    return float(z[0, 0]) if scalar else z[0].reshape(x.shape)


def terrain_gradient(terrain: Terrain, x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    scalar = x.ndim == 0
    tb = TerrainBatch([terrain])
    _, gx, gy = tb.sample(x.reshape(1, -1), y.reshape(1, -1))
    if scalar:
        return float(gx[0, 0]), float(gy[0, 0])
    return gx[0].reshape(x.shape), gy[0].reshape(x.shape)


def save_terrain(terrain: Terrain, path) -> None:
    """Binary heightfield: magic, version, kind, cell size, dims, origin, data."""
    kind = terrain.kind.encode("ascii").ljust(8, b"\0")
    if terrain.is_flat:
        h = w = 0
        body = b""
    else:
        h, w = terrain.heights.shape
        body = terrain.heights.astype("<f8").tobytes()
    header = struct.pack("<4sI8sdIIddq", _MAGIC, _VERSION, kind,
                         terrain.cell_size, h, w,
                         terrain.origin[0], terrain.origin[1], terrain.seed)
    Path(path).write_bytes(header + body)


def load_terrain(path) -> Terrain:
    raw = Path(path).read_bytes()
    header_size = struct.calcsize("<4sI8sdIIddq")
    magic, version, kind, cell, h, w, ox, oy, seed = struct.unpack(
        "<4sI8sdIIddq", raw[:header_size])
    if magic != _MAGIC:
        raise ValueError(f"not a terrain file: bad magic {magic!r}")
    if version != _VERSION:
        raise ValueError(f"unsupported terrain file version {version}")
    kind = kind.rstrip(b"\0").decode("ascii")
    heights = None
    if h > 0:
        heights = np.frombuffer(raw[header_size:], dtype="<f8").reshape(h, w).copy()
    return Terrain(kind=kind, cell_size=cell, heights=heights,
                   origin=(ox, oy), seed=int(seed))
