"""Geometry oracles: containment, ray casting, visibility, polygon checks."""

import math

import numpy as np
import pytest

from wayfarer import geometry
from wayfarer.errors import SceneSchemaError, SceneValidationError
from wayfarer.geometry import Pose
from wayfarer.scene import contains_walkable, raycast, visible_objects

from conftest import make_scene, obj, random_scene, square

# ---------------------------------------------------------------------------
# Independent oracles (brute force, separate code paths from the engine).


def oracle_point_in_polygon(point, poly):
    """Even-odd rule via explicit horizontal-ray edge crossings, plus an
    exact on-edge check, written independently of the kernel."""
    px, py = point
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross == 0.0 and min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by):
            return True
    crossings = 0
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        if (ay > py) != (by > py):
            t = (py - ay) / (by - ay)
            if px < ax + t * (bx - ax):
                crossings += 1
    return crossings % 2 == 1


def oracle_contains_walkable(scene, point):
    if not any(oracle_point_in_polygon(point, poly) for poly in scene.walkable):
        return False
    return not any(oracle_point_in_polygon(point, o.footprint) for o in scene.objects)


def oracle_ray_edge(ox, oy, dx, dy, ax, ay, bx, by):
    """Ray/segment intersection via the explicit 2x2 inverse; None if miss."""
    ex, ey = bx - ax, by - ay
    det = -dx * ey + dy * ex
    if det == 0.0:
        return None
    wx, wy = ax - ox, ay - oy
    t = (-wx * ey + wy * ex) / det
    u = (dx * wy - dy * wx) / det
    if t > 0.0 and 0.0 <= u <= 1.0:
        return t
    return None


def oracle_raycast(scene, origin, direction, max_range):
    """All-edges brute force with the documented tie rules."""
    candidates = []
    for o in sorted(scene.objects, key=lambda o: o.id):
        poly = o.footprint
        for i in range(len(poly)):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % len(poly)]
            t = oracle_ray_edge(origin[0], origin[1], direction[0], direction[1], ax, ay, bx, by)
            if t is not None and t <= max_range:
                candidates.append((t, 0, o.id, o.label, o.caption))
    for poly in scene.walkable:
        for i in range(len(poly)):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % len(poly)]
            t = oracle_ray_edge(origin[0], origin[1], direction[0], direction[1], ax, ay, bx, by)
            if t is not None and t <= max_range:
                candidates.append((t, 1, "", "wall", None))
    if not candidates:
        return None
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    t, _, _, label, caption = candidates[0]
    return label, caption, t


# ---------------------------------------------------------------------------
# contains_walkable


def test_spawn_point_is_walkable(kendall):
    for spawn in kendall.spawns:
        assert contains_walkable(kendall, spawn.pose.position)


def test_object_centroid_is_not_walkable():
    building = obj("b1", "building", square(5, 5, 2))
    scn = make_scene(objects=[building])
    assert not contains_walkable(scn, (5.0, 5.0))
    assert contains_walkable(scn, (0.0, 0.0))


def test_walkable_boundary_counts_as_inside():
    scn = make_scene(walkable=[square(0, 0, 10)])
    assert contains_walkable(scn, (10.0, 0.0))
    assert contains_walkable(scn, (10.0, 10.0))
    assert not contains_walkable(scn, (10.000001, 0.0))


def test_object_boundary_counts_as_blocked():
    building = obj("b1", "building", square(5, 5, 2))
    scn = make_scene(objects=[building])
    assert not contains_walkable(scn, (3.0, 5.0))


def test_contains_walkable_matches_even_odd_oracle():
    rng = np.random.default_rng(101)
    for _ in range(10):
        scn = random_scene(rng)
        pts = rng.uniform(-60, 60, size=(1000, 2))
        for x, y in pts:
            assert contains_walkable(scn, (x, y)) == oracle_contains_walkable(scn, (x, y))


# ---------------------------------------------------------------------------
# raycast


def test_wall_two_meters_ahead(wall_ahead_scene):
    hit = raycast(wall_ahead_scene, (0.0, 0.0), (0.0, 1.0), 50.0)
    assert hit is not None
    assert hit.label == "wall"
    assert hit.distance == pytest.approx(2.0, abs=1e-12)


def test_empty_scene_ray(empty_world):
    assert raycast(empty_world, (0.0, 0.0), (0.0, 1.0), 50.0) is None
    hit = raycast(empty_world, (0.0, 0.0), (0.0, 1.0), 150.0)
    assert hit is not None and hit.label == "wall"
    assert hit.distance == pytest.approx(100.0, abs=1e-12)


def test_raycast_requires_unit_direction(empty_world):
    with pytest.raises(ValueError):
        raycast(empty_world, (0.0, 0.0), (0.0, 2.0), 50.0)
    with pytest.raises(ValueError):
        raycast(empty_world, (0.0, 0.0), (0.0, 1.0), 0.0)


def test_raycast_tie_breaks_lower_object_id():
    shared = [[-3, 4], [3, 4], [3, 6], [-3, 6]]
    a = obj("aaa", "tree", shared)
    b = obj("bbb", "bench", shared)
    scn = make_scene(objects=[b, a])
    hit = raycast(scn, (0.0, 0.0), (0.0, 1.0), 50.0)
    assert hit.label == "tree"  # owned by id "aaa"


def test_raycast_boundary_loses_ties():
    edge = [[-3, 100], [3, 100], [3, 103], [-3, 103]]  # front face on the boundary
    a = obj("ped", "pedestrian", edge)
    scn = make_scene(objects=[a], walkable=[square(0, 0, 100)])
    hit = raycast(scn, (0.0, 0.0), (0.0, 1.0), 150.0)
    assert hit.label == "pedestrian"


def test_raycast_matches_all_edges_oracle():
    rng = np.random.default_rng(202)
    checked = 0
    for _ in range(40):
        scn = random_scene(rng)
        for _ in range(25):
            origin = tuple(rng.uniform(-45, 45, 2))
            theta = rng.uniform(0, 2 * math.pi)
            direction = (math.cos(theta), math.sin(theta))
            max_range = float(rng.uniform(5, 150))
            got = raycast(scn, origin, direction, max_range)
            want = oracle_raycast(scn, origin, direction, max_range)
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert got.label == want[0]
                assert got.distance == pytest.approx(want[2], abs=1e-9)
            checked += 1
    assert checked == 1000


def test_raycast_monotone_in_range():
    rng = np.random.default_rng(303)
    for _ in range(200):
        scn = random_scene(rng, n_objects=4)
        origin = tuple(rng.uniform(-40, 40, 2))
        theta = rng.uniform(0, 2 * math.pi)
        direction = (math.cos(theta), math.sin(theta))
        far = raycast(scn, origin, direction, 150.0)
        near = raycast(scn, origin, direction, 40.0)
        if near is not None:
            assert far is not None
            assert near.label == far.label
            assert near.distance == far.distance
        elif far is not None:
            assert far.distance > 40.0


# ---------------------------------------------------------------------------
# visible_objects


def test_visible_empty_scene(empty_world):
    assert visible_objects(empty_world, Pose(0, 0, 0), 120.0, 50.0) == []


def test_single_tree_ahead():
    tree = obj("t1", "tree", square(0, 5, 0.4), height=6.0)
    scn = make_scene(objects=[tree])
    vis = visible_objects(scn, Pose(0, 0, 0), 120.0, 50.0)
    assert len(vis) == 1
    entry = vis[0]
    assert entry.label == "tree"
    assert abs(entry.relative_bearing) <= 5.0
    assert entry.distance == pytest.approx(4.6, abs=0.05)
    assert entry.angular_width >= 1.0


def test_occluded_object_absent():
    building = obj("b1", "building", square(0, 10, 4), height=15.0)
    tree = obj("t1", "tree", square(0, 20, 0.5), height=6.0)
    scn = make_scene(objects=[building, tree])
    vis = visible_objects(scn, Pose(0, 0, 0), 120.0, 50.0)
    labels = [v.label for v in vis]
    assert "building" in labels
    assert "tree" not in labels
    # Dense-fan oracle: no 0.1-degree ray reaches the tree first.
    for tenth in range(-600, 601):
        bearing = tenth / 10.0
        direction = geometry.heading_vector(bearing)
        want = oracle_raycast(scn, (0.0, 0.0), direction, 50.0)
        assert want is None or want[0] == "building"


def test_visible_objects_sorted_near_to_far():
    near = obj("n", "bench", square(-2, 6, 0.5))
    far = obj("f", "sign", square(2, 12, 0.5))
    scn = make_scene(objects=[near, far])
    vis = visible_objects(scn, Pose(0, 0, 0), 120.0, 50.0)
    assert [v.label for v in vis] == ["bench", "sign"]
    assert vis[0].distance < vis[1].distance


def test_visible_objects_fov_validation(empty_world):
    with pytest.raises(ValueError):
        visible_objects(empty_world, Pose(0, 0, 0), 0.0, 50.0)
    with pytest.raises(ValueError):
        visible_objects(empty_world, Pose(0, 0, 0), 181.0, 50.0)


# ---------------------------------------------------------------------------
# polygon validation helpers


def test_polygon_simple_check():
    bowtie = np.array([[0, 0], [2, 2], [2, 0], [0, 2]], dtype=float)
    assert not geometry.polygon_is_simple(bowtie)
    box = square(0, 0, 1)
    assert geometry.polygon_is_simple(box)


def test_build_scene_rejects_self_intersection():
    bad = obj("bow", "building", [[0, 0], [2, 2], [2, 0], [0, 2]])
    with pytest.raises(SceneValidationError) as err:
        make_scene(objects=[bad])
    assert "bow" in str(err.value)


def test_build_scene_rejects_duplicate_ids():
    a = obj("dup", "tree", square(3, 3, 0.5))
    b = obj("dup", "bench", square(-3, -3, 0.5))
    with pytest.raises(SceneValidationError):
        make_scene(objects=[a, b])


def test_spawn_outside_walkable_rejected():
    from wayfarer.scene import Spawn

    with pytest.raises(SceneValidationError):
        make_scene(spawns=[Spawn("default", Pose(500.0, 0.0, 0.0))])


def test_goal_must_touch_walkable():
    from wayfarer.scene import Goal

    goal = Goal("g", "far away", square(500, 500, 3))
    with pytest.raises(SceneValidationError):
        make_scene(goals=[goal])


def test_polygon_centroid_square():
    assert geometry.polygon_centroid(square(3, -2, 5)) == pytest.approx((3.0, -2.0))


def test_point_polygon_distance():
    poly = square(0, 0, 2)
    assert geometry.point_polygon_distance((0, 0), poly) == 0.0
    assert geometry.point_polygon_distance((5, 0), poly) == pytest.approx(3.0)
    assert geometry.point_polygon_distance((2, 2), poly) == 0.0
