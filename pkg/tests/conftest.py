"""Shared fixtures and scene builders for the test suite."""

import math

import numpy as np
import pytest

from wayfarer import scene as scene_mod
from wayfarer.agent import Persona, TaskSpec
from wayfarer.geometry import Pose
from wayfarer.scene import Goal, SceneObject, Spawn, build_scene


def square(cx, cy, half):
    return np.array(
        [[cx - half, cy - half], [cx + half, cy - half],
         [cx + half, cy + half], [cx - half, cy + half]],
        dtype=float,
    )


def make_scene(objects=(), walkable=None, goals=(), spawns=None, metadata=None,
               scene_id="test"):
    if walkable is None:
        walkable = [square(0, 0, 100.0)]
    if spawns is None:
        spawns = [Spawn("default", Pose(0.0, 0.0, 0.0))]
    if metadata is None:
        metadata = {
            "season": "summer",
            "time_of_day": "morning",
            "weather": "bright",
            "locale": "the test block",
        }
    return build_scene(scene_id, list(objects), list(walkable), list(goals),
                       list(spawns), metadata)


def obj(oid, label, footprint, height=3.0, caption=None):
    return SceneObject(oid, label, np.asarray(footprint, dtype=float), height, caption)


@pytest.fixture(scope="session")
def kendall():
    return scene_mod.load_scene("kendall_base")


@pytest.fixture
def empty_world():
    return make_scene()


@pytest.fixture
def wall_ahead_scene():
    """A wall segment 2 m in front of a north-facing agent at the origin."""
    wall = obj("wall-1", "wall", [[-5, 2], [5, 2], [5, 2.4], [-5, 2.4]], height=3.0)
    return make_scene(objects=[wall])


def random_star_polygon(rng, cx, cy, radius, n_min=3, n_max=8):
    """Random simple polygon, star-shaped about its center.

    Evenly spaced angles with bounded jitter keep every angular gap under
    180 degrees, which guarantees simplicity for any radius choice.
    """
    n = int(rng.integers(n_min, n_max + 1))
    base = 2 * math.pi * np.arange(n) / n
    jitter = rng.uniform(-0.45, 0.45, n) * (math.pi / n)
    angles = base + jitter
    radii = rng.uniform(0.3 * radius, radius, n)
    pts = np.stack([cx + radii * np.cos(angles), cy + radii * np.sin(angles)], axis=1)
    return pts


def random_scene(rng, n_objects=None, half=50.0):
    """Random validated scene: big square walkable, convex obstacles."""
    labels = sorted(scene_mod.CLASS_LABELS)
    if n_objects is None:
        n_objects = int(rng.integers(1, 8))
    objects = []
    for i in range(n_objects):
        cx, cy = rng.uniform(-half * 0.8, half * 0.8, 2)
        poly = random_star_polygon(rng, cx, cy, rng.uniform(1.0, 8.0))
        label = labels[int(rng.integers(0, len(labels)))]
        objects.append(obj(f"obj-{i:02d}", label, poly, height=float(rng.uniform(0.5, 20))))
    # Spawn anywhere clear of the obstacles.
    for _ in range(1000):
        px, py = rng.uniform(-half * 0.9, half * 0.9, 2)
        if all(not _point_in(o.footprint, px, py) for o in objects):
            break
    spawn = Spawn("default", Pose(float(px), float(py), float(rng.uniform(0, 360))))
    return make_scene(objects=objects, walkable=[square(0, 0, half)], spawns=[spawn],
                      scene_id=f"random-{rng.integers(1 << 30)}")


def _point_in(poly, x, y):
    # Plain even-odd check used only while sampling spawn candidates.
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xint:
                inside = not inside
    return inside


def default_task(**overrides):
    base = dict(
        objective="Reach the marked goal.",
        subtasks=("Look around for a coffee shop.",),
        step_limit=30,
        compass_enabled=True,
        goal_id="goal",
    )
    base.update(overrides)
    return TaskSpec(**base)


def default_persona():
    return Persona("a test pedestrian", {"age": "30"})
