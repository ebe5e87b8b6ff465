import numpy as np
import pytest

from quadbench.sim import (
    MAX_SLOPE_DEG,
    STEP_HEIGHT,
    Terrain,
    flat_terrain,
    load_terrain,
    make_terrain,
    save_terrain,
    slopes_terrain,
    steps_terrain,
    terrain_gradient,
    terrain_height,
)


def test_flat_is_zero_everywhere():
    t = flat_terrain()
    rng = np.random.default_rng(0)
    for _ in range(100):
        x, y = rng.uniform(-50, 50, 2)
        assert terrain_height(t, x, y) == 0.0
    gx, gy = terrain_gradient(t, 3.0, -7.0)
    assert gx == 0.0 and gy == 0.0


def test_steps_adjacent_cells_differ_by_zero_or_step_height():
    t = steps_terrain(seed=7)
    dx = np.diff(t.heights, axis=0).ravel()
    dy = np.diff(t.heights, axis=1).ravel()
    for d in np.concatenate([dx, dy]):
        assert min(abs(d), abs(abs(d) - STEP_HEIGHT)) < 1e-12


def test_steps_height_is_five_centimeters():
    t = steps_terrain(seed=3)
    levels = np.unique(np.round(t.heights / STEP_HEIGHT).astype(int))
    assert len(levels) > 3  # actually irregular
    np.testing.assert_allclose(
        np.unique(t.heights), np.unique(levels) * STEP_HEIGHT, atol=1e-12)


def test_slopes_gradient_bounded_by_15_degrees():
    # brute-force finite-difference scan over a dense grid
    t = slopes_terrain(seed=11)
    n = 400
    xs = np.linspace(-9.5, 9.5, n)
    ys = np.linspace(-9.5, 9.5, n)
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    h = 1e-4
    z_xp = terrain_height(t, xg + h, yg)
    z_xm = terrain_height(t, xg - h, yg)
    z_yp = terrain_height(t, xg, yg + h)
    z_ym = terrain_height(t, xg, yg - h)
    grad = np.hypot((z_xp - z_xm) / (2 * h), (z_yp - z_ym) / (2 * h))
    assert grad.max() <= np.tan(np.radians(MAX_SLOPE_DEG)) + 1e-9


def test_slopes_reach_nontrivial_inclines():
    t = slopes_terrain(seed=11)
    gx, gy = terrain_gradient(t, *np.meshgrid(
        np.linspace(-9, 9, 200), np.linspace(-9, 9, 200), indexing="ij"))
    assert np.degrees(np.arctan(np.hypot(gx, gy).max())) > 10.0


def test_bilinear_interpolation_against_hand_case():
    heights = np.array([[0.0, 1.0], [2.0, 3.0]])
    t = Terrain(kind="slopes", cell_size=1.0, heights=heights, origin=(0.0, 0.0))
    assert terrain_height(t, 0.0, 0.0) == 0.0
    assert terrain_height(t, 1.0, 1.0) == 3.0
    assert terrain_height(t, 0.5, 0.5) == pytest.approx(1.5)
    assert terrain_height(t, 0.25, 0.75) == pytest.approx(
        0.0 * 0.75 * 0.25 + 2.0 * 0.25 * 0.25 + 1.0 * 0.75 * 0.75 + 3.0 * 0.25 * 0.75)


def test_out_of_grid_clamps_to_edge():
    heights = np.array([[0.0, 1.0], [2.0, 3.0]])
    t = Terrain(kind="slopes", cell_size=1.0, heights=heights, origin=(0.0, 0.0))
    assert terrain_height(t, -5.0, -5.0) == 0.0
    assert terrain_height(t, 5.0, 5.0) == 3.0


def test_spawn_point_is_level():
    for kind in ("slopes", "steps"):
        t = make_terrain(kind, seed=5)
        assert terrain_height(t, 0.0, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_round_trip_bytes(tmp_path):
    for t in (flat_terrain(), slopes_terrain(seed=2), steps_terrain(seed=9)):
        p1 = tmp_path / "a.terrain"
        p2 = tmp_path / "b.terrain"
        save_terrain(t, p1)
        t2 = load_terrain(p1)
        assert t2.kind == t.kind
        assert t2.cell_size == t.cell_size
        assert t2.origin == t.origin
        assert t2.seed == t.seed
        if t.is_flat:
            assert t2.is_flat
        else:
            assert np.array_equal(t2.heights, t.heights)
        save_terrain(t2, p2)
        assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "junk.terrain"
    p.write_bytes(b"JUNKJUNKJUNK" + b"\0" * 64)
    with pytest.raises(ValueError, match="magic"):
        load_terrain(p)


def test_terrain_generation_is_seeded():
    a = slopes_terrain(seed=4)
    b = slopes_terrain(seed=4)
    c = slopes_terrain(seed=5)
    assert np.array_equal(a.heights, b.heights)
    assert not np.array_equal(a.heights, c.heights)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        make_terrain("lava", seed=0)
    with pytest.raises(ValueError):
        Terrain(kind="lava")
