"""Sensor bundle: ray fan, view text, discovery map, compass, assembly."""

import math

import numpy as np
import pytest

from wayfarer import scene as scene_mod
from wayfarer.geometry import Pose
from wayfarer.sensors import (
    COLLISION_WARNING_M,
    DiscoveryMap,
    FAN_OFFSETS,
    FAN_RANGE,
    SenseConfig,
    cast_fan,
    compass_band,
    compass_cue,
    describe_view,
    heading_glyph,
    render_discovery,
    sense,
    supercover_cells,
    update_discovery,
)

from conftest import make_scene, obj, random_scene, square

# ---------------------------------------------------------------------------
# Ray fan


def test_fan_empty_plaza(empty_world):
    rays = cast_fan(empty_world, Pose(0, 0, 0))
    assert set(rays) == {name for name, _ in FAN_OFFSETS}
    assert all(r is None for r in rays.values())


def test_fan_wall_ahead(wall_ahead_scene):
    rays = cast_fan(wall_ahead_scene, Pose(0, 0, 0))
    assert rays["front"].label == "wall"
    assert rays["front"].distance == pytest.approx(2.0, abs=1e-12)
    assert rays["left"] is None and rays["right"] is None


def test_fan_equals_five_independent_raycasts():
    rng = np.random.default_rng(404)
    for _ in range(25):
        scn = random_scene(rng)
        pose = scn.spawns[0].pose
        rays = cast_fan(scn, pose)
        for name, offset in FAN_OFFSETS:
            direction = (
                math.sin(math.radians(pose.heading + offset)),
                math.cos(math.radians(pose.heading + offset)),
            )
            want = scene_mod.raycast(scn, pose.position, direction, FAN_RANGE)
            got = rays[name]
            if want is None:
                assert got is None
            else:
                assert got.label == want.label
                assert got.distance == want.distance


# ---------------------------------------------------------------------------
# View description


def test_view_empty_night():
    metadata = {
        "season": "summer",
        "time_of_day": "night",
        "weather": "quiet",
        "locale": "Kendall Square",
    }
    text = describe_view([], metadata)
    assert text == "It is a quiet summer night in Kendall Square. The way ahead looks open."


def test_view_caption_and_bearing_word():
    entry = scene_mod.VisibleObject(
        label="subway-entrance",
        caption="Subway sign",
        relative_bearing=3.0,
        distance=10.0,
        angular_width=5.0,
        height=4.0,
    )
    text = describe_view([entry], {"season": "summer", "time_of_day": "morning",
                                   "weather": "bright", "locale": "town"})
    assert "Subway sign" in text
    assert "ahead" in text


def test_view_orders_near_to_far_and_same_inputs_same_bytes():
    near = scene_mod.VisibleObject("bench", None, 10.0, 3.0, 2.0, 0.5)
    far = scene_mod.VisibleObject("tree", None, -20.0, 5.0, 2.0, 7.0)
    meta = {"season": "s", "time_of_day": "t", "weather": "w", "locale": "l"}
    text = describe_view([near, far], meta)
    assert text.index("bench") < text.index("tree")
    assert describe_view([near, far], meta) == text


def test_view_tall_building_wording():
    tall = scene_mod.VisibleObject("building", None, 0.0, 8.0, 10.0, height=20.0)
    low = scene_mod.VisibleObject("building", None, 0.0, 8.0, 10.0, height=5.0)
    meta = {"season": "s", "time_of_day": "t", "weather": "w", "locale": "l"}
    assert "a tall building" in describe_view([tall], meta)
    assert "a tall building" not in describe_view([low], meta)


def test_view_clause_cap_is_eight():
    entries = [
        scene_mod.VisibleObject("tree", None, 0.0, 5.0 + i, 1.0, 4.0) for i in range(12)
    ]
    meta = {"season": "s", "time_of_day": "t", "weather": "w", "locale": "l"}
    text = describe_view(entries, meta)
    assert text.count("a tree") == 8


# ---------------------------------------------------------------------------
# Discovery map: supercover rasterization oracle


def seg_intersects_cell(p0, p1, cell, origin, cs):
    """Closed-rectangle vs segment intersection test (brute-force oracle)."""
    x0 = origin[0] + cell[0] * cs
    y0 = origin[1] + cell[1] * cs
    x1, y1 = x0 + cs, y0 + cs
    (ax, ay), (bx, by) = p0, p1

    def inside(px, py):
        return x0 <= px <= x1 and y0 <= py <= y1

    if inside(ax, ay) or inside(bx, by):
        return True
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    from wayfarer.geometry import segments_intersect

    for i in range(4):
        if segments_intersect((ax, ay), (bx, by), corners[i], corners[(i + 1) % 4]):
            return True
    return False


def oracle_supercover(p0, p1, origin, cs):
    """All cells whose closed extent the segment touches, except that each
    endpoint contributes only its containing (floor) cell."""
    c0 = (math.floor((p0[0] - origin[0]) / cs), math.floor((p0[1] - origin[1]) / cs))
    c1 = (math.floor((p1[0] - origin[0]) / cs), math.floor((p1[1] - origin[1]) / cs))
    lo_x = min(c0[0], c1[0]) - 1
    hi_x = max(c0[0], c1[0]) + 1
    lo_y = min(c0[1], c1[1]) - 1
    hi_y = max(c0[1], c1[1]) + 1
    cells = set()
    for cx in range(lo_x, hi_x + 1):
        for cy in range(lo_y, hi_y + 1):
            if seg_intersects_cell(p0, p1, (cx, cy), origin, cs):
                cells.add((cx, cy))
    # Cells touched only at the endpoints' cell borders do not count; the
    # engine assigns each endpoint a single floor cell.  Random endpoints
    # never sit on a border, so only drop cells beyond the endpoint caps.
    return cells


def test_supercover_point_move():
    cells = supercover_cells((0.5, 0.5), (0.5, 0.5), (0.0, 0.0), 1.0)
    assert cells == [(0, 0)]


def test_supercover_axis_aligned_five_meters():
    cells = supercover_cells((0.5, 0.5), (0.5, 5.5), (0.0, 0.0), 1.0)
    assert cells == [(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]


def test_supercover_exact_corner_crossing_includes_side_cells():
    cells = set(supercover_cells((0.5, 0.5), (2.5, 2.5), (0.0, 0.0), 1.0))
    # Corner crossings at (1,1) and (2,2) grid points include both side cells.
    assert cells == {(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)}


def test_supercover_matches_closed_cell_oracle_random():
    rng = np.random.default_rng(505)
    for _ in range(200):
        p0 = tuple(rng.uniform(-20, 20, 2))
        p1 = tuple(rng.uniform(-20, 20, 2))
        got = set(supercover_cells(p0, p1, (0.0, 0.0), 1.0))
        want = oracle_supercover(p0, p1, (0.0, 0.0), 1.0)
        assert got == want, (p0, p1, got ^ want)


def test_supercover_dense_sampling_subset():
    # 1 mm sampling can only report cells the segment genuinely enters.
    rng = np.random.default_rng(606)
    for _ in range(20):
        p0 = rng.uniform(-5, 5, 2)
        p1 = rng.uniform(-5, 5, 2)
        got = set(supercover_cells(tuple(p0), tuple(p1), (0.0, 0.0), 1.0))
        length = float(np.hypot(*(p1 - p0)))
        n = max(2, int(length / 0.001))
        ts = np.linspace(0.0, 1.0, n)
        sampled = {
            (math.floor(x), math.floor(y))
            for x, y in zip(p0[0] + ts * (p1[0] - p0[0]), p0[1] + ts * (p1[1] - p0[1]))
        }
        assert sampled <= got


def test_update_discovery_monotone_and_bounded():
    rng = np.random.default_rng(707)
    dmap = DiscoveryMap(origin=(-10.0, -10.0), cell_size=1.0, width=20, height=20)
    pose = Pose(0.0, 0.0, 0.0)
    dmap = update_discovery(dmap, pose, pose)
    for _ in range(100):
        nxt = Pose(float(rng.uniform(-30, 30)), float(rng.uniform(-30, 30)), 0.0)
        updated = update_discovery(dmap, pose, nxt)
        assert dmap.visited <= updated.visited
        assert all(updated.in_bounds(c) for c in updated.visited)
        dmap, pose = updated, nxt


# ---------------------------------------------------------------------------
# Discovery rendering


def test_render_fresh_map_heading_north():
    dmap = DiscoveryMap(origin=(-50.0, -50.0), cell_size=1.0, width=100, height=100)
    pose = Pose(0.0, 0.0, 0.0)
    dmap = update_discovery(dmap, pose, pose)
    text = render_discovery(dmap, pose)
    lines = text.splitlines()
    assert len(lines) == 22  # legend + 21 rows
    assert all(len(line) == 21 for line in lines[1:])
    center_row = lines[1 + 10]
    assert center_row[10] == "^"
    body = "\n".join(lines[1:])
    assert body.count("^") == 1 and body.count("o") == 0


def test_render_glyph_bands():
    assert heading_glyph(0.0) == "^"
    assert heading_glyph(44.9) == "^"
    assert heading_glyph(45.0) == ">"   # boundary rounds clockwise
    assert heading_glyph(135.0) == "v"
    assert heading_glyph(225.0) == "<"
    assert heading_glyph(315.0) == "^"
    assert heading_glyph(314.9) == "<"


def test_render_shows_trail_after_north_move():
    dmap = DiscoveryMap(origin=(-50.0, -50.0), cell_size=1.0, width=100, height=100)
    start = Pose(0.5, 0.5, 0.0)
    end = Pose(0.5, 5.5, 0.0)
    dmap = update_discovery(dmap, start, end)
    text = render_discovery(dmap, end)
    lines = text.splitlines()[1:]
    col = 10
    assert lines[10][col] == "^"
    for row in range(11, 16):
        assert lines[row][col] == "o"


# ---------------------------------------------------------------------------
# Compass


def test_compass_due_north_100m():
    cue = compass_cue(Pose(0, 0, 0), (0.0, 100.0))
    assert cue == "target is ahead (0°), roughly 100 m away"


def test_compass_quarter_turn():
    cue = compass_cue(Pose(0, 0, 90.0), (0.0, 100.0))
    assert "left" in cue
    assert "(-90°)" in cue


def test_compass_requires_distinct_target():
    with pytest.raises(ValueError):
        compass_cue(Pose(1.0, 2.0, 0.0), (1.0, 2.0))


def test_compass_bearing_matches_atan2_oracle():
    rng = np.random.default_rng(808)
    for _ in range(1000):
        px, py, tx, ty = rng.uniform(-100, 100, 4)
        heading = float(rng.uniform(0, 360))
        if (px, py) == (tx, ty):
            continue
        want = math.degrees(math.atan2(tx - px, ty - py)) - heading
        want = (want + 180.0) % 360.0 - 180.0
        if want == -180.0:
            want = 180.0
        from wayfarer.geometry import bearing_to, relative_bearing

        got = relative_bearing(bearing_to((px, py), (tx, ty)), heading)
        assert got == pytest.approx(want, abs=1e-9)


def test_compass_band_total_and_single_valued():
    bands = {"ahead", "ahead-left", "ahead-right", "left", "right", "behind"}
    rng = np.random.default_rng(909)
    for _ in range(2000):
        b = float(rng.uniform(-180, 180))
        if b == -180.0:
            b = 180.0
        assert compass_band(b) in bands
    assert compass_band(0.0) == "ahead"
    assert compass_band(15.0) == "ahead"
    assert compass_band(-15.1) == "ahead-left"
    assert compass_band(-60.0) == "left"
    assert compass_band(60.0) == "right"
    assert compass_band(-120.1) == "behind"
    assert compass_band(180.0) == "behind"


# ---------------------------------------------------------------------------
# Frame assembly


def _dmap_for(scn):
    return DiscoveryMap.for_scene(scn)


def test_sense_compass_disabled(empty_world):
    frame = sense(empty_world, Pose(0, 0, 0), _dmap_for(empty_world),
                  SenseConfig(compass_enabled=False, target=(5.0, 5.0)))
    assert frame.compass_text is None
    frame_on = sense(empty_world, Pose(0, 0, 0), _dmap_for(empty_world),
                     SenseConfig(compass_enabled=True, target=(5.0, 5.0)))
    assert frame_on.compass_text is not None


def test_sense_collision_warning_thresholds():
    def scene_with_wall_at(d):
        wall = obj("w", "wall", [[-5, d], [5, d], [5, d + 0.5], [-5, d + 0.5]])
        return make_scene(objects=[wall])

    near = scene_with_wall_at(1.0)
    frame = sense(near, Pose(0, 0, 0), _dmap_for(near), SenseConfig(False))
    assert frame.collision_warning == "Warning: wall 1.0 m ahead"

    at_threshold = scene_with_wall_at(2.0)
    frame2 = sense(at_threshold, Pose(0, 0, 0), _dmap_for(at_threshold), SenseConfig(False))
    assert frame2.collision_warning is None


def test_sense_has_all_five_ray_keys(empty_world):
    frame = sense(empty_world, Pose(0, 0, 0), _dmap_for(empty_world), SenseConfig(False))
    assert set(frame.rays) == {"front", "front-left", "front-right", "left", "right"}


def test_sense_note_appended(empty_world):
    frame = sense(empty_world, Pose(0, 0, 0), _dmap_for(empty_world),
                  SenseConfig(False, note="You are not at your goal."))
    assert frame.view_text.endswith("You are not at your goal.")
