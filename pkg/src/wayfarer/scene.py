"""Semantic 2.5D scene: labeled footprints, walkable region, goals, spawns.

Geometry is planar (footprint polygons plus a height used only for text
descriptions).  A scene is immutable after loading and safe to share across
concurrently running simulations; every query here is a pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import geometry, kernels
from .errors import SceneSchemaError, SceneValidationError
from .geometry import Pose

SCHEMA_VERSION = 1

CLASS_LABELS = frozenset(
    {
        "building",
        "wall",
        "tree",
        "bench",
        "sign",
        "road",
        "sidewalk",
        "plaza",
        "subway-entrance",
        "pedestrian",
        "vehicle",
        "fence",
        "stairs",
        "door",
    }
)

BUNDLED_SCENES = ("kendall_base", "kendall_winter", "kendall_night", "tokyo")

# A footprint this tall gets called out as "tall" in view descriptions.
TALL_HEIGHT_M = 12.0


@dataclass(frozen=True)
class SceneObject:
    id: str
    label: str
    footprint: np.ndarray
    height: float
    caption: str | None = None


@dataclass(frozen=True)
class Goal:
    id: str
    name: str
    polygon: np.ndarray


@dataclass(frozen=True)
class Spawn:
    id: str
    pose: Pose


@dataclass(frozen=True)
class RayHit:
    label: str
    caption: str | None
    distance: float


@dataclass(frozen=True)
class VisibleObject:
    label: str
    caption: str | None
    relative_bearing: float
    distance: float
    angular_width: float
    height: float = 0.0


@dataclass(frozen=True)
class Scene:
    scene_id: str
    objects: tuple[SceneObject, ...]
    walkable: tuple[np.ndarray, ...]
    goals: tuple[Goal, ...]
    spawns: tuple[Spawn, ...]
    metadata: dict
    # Baked geometry shared by every query; built once in load/validate.
    _all_segs: np.ndarray = field(repr=False, default=None)
    _all_ranks: np.ndarray = field(repr=False, default=None)
    _all_owner: np.ndarray = field(repr=False, default=None)
    _obj_segs: np.ndarray = field(repr=False, default=None)
    _obj_ranks: np.ndarray = field(repr=False, default=None)
    _obj_owner: np.ndarray = field(repr=False, default=None)

    def goal(self, goal_id):
        for g in self.goals:
            if g.id == goal_id:
                return g
        raise KeyError(f"no goal '{goal_id}' in scene '{self.scene_id}'")

    def spawn(self, spawn_id):
        for s in self.spawns:
            if s.id == spawn_id:
                return s
        raise KeyError(f"no spawn '{spawn_id}' in scene '{self.scene_id}'")

    def bounds(self):
        """(minx, miny, maxx, maxy) over the walkable region."""
        allpts = np.vstack(self.walkable)
        return (
            float(allpts[:, 0].min()),
            float(allpts[:, 1].min()),
            float(allpts[:, 0].max()),
            float(allpts[:, 1].max()),
        )


def _bake(objects, walkable):
    """Flatten footprints and walkable boundaries into segment soups.

    Objects are ranked by id (ascending) so exact-distance raycast ties go
    to the lower id; the walkable boundary ranks last so it loses ties.
    """
    order = sorted(range(len(objects)), key=lambda i: objects[i].id)
    obj_rows, obj_rank, obj_owner = [], [], []
    for rank, i in enumerate(order):
        edges = geometry.polygon_edges(objects[i].footprint)
        for e in edges:
            obj_rows.append(e)
            obj_rank.append(rank)
            obj_owner.append(i)
    boundary_rank = len(objects)
    all_rows = list(obj_rows)
    all_rank = list(obj_rank)
    all_owner = list(obj_owner)
    for poly in walkable:
        for e in geometry.polygon_edges(poly):
            all_rows.append(e)
            all_rank.append(boundary_rank)
            all_owner.append(-1)

    def pack(rows, ranks, owners):
        if rows:
            return (
                np.asarray(rows, dtype=np.float64),
                np.asarray(ranks, dtype=np.int64),
                np.asarray(owners, dtype=np.int64),
            )
        return (
            np.empty((0, 4), dtype=np.float64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
        )

    return pack(all_rows, all_rank, all_owner), pack(obj_rows, obj_rank, obj_owner)


def build_scene(scene_id, objects, walkable, goals, spawns, metadata):
    """Assemble and validate a Scene from parsed parts."""
    seen = set()
    for obj in objects:
        if obj.id in seen:
            raise SceneValidationError(obj.id, "duplicate object id")
        seen.add(obj.id)
        if obj.label not in CLASS_LABELS:
            raise SceneValidationError(obj.id, f"unknown class label '{obj.label}'")
        if obj.height < 0:
            raise SceneValidationError(obj.id, "height must be >= 0")
        if not geometry.polygon_is_simple(obj.footprint):
            raise SceneValidationError(obj.id, "footprint polygon self-intersects")
        if abs(geometry.signed_area(obj.footprint)) <= 0.0:
            raise SceneValidationError(obj.id, "footprint has zero area")
    if not walkable:
        raise SceneValidationError("walkable", "walkable region is empty")
    for i, poly in enumerate(walkable):
        if not geometry.polygon_is_simple(poly):
            raise SceneValidationError(f"walkable[{i}]", "polygon self-intersects")
        if abs(geometry.signed_area(poly)) <= 0.0:
            raise SceneValidationError(f"walkable[{i}]", "polygon has zero area")
    scene = Scene(
        scene_id=scene_id,
        objects=tuple(objects),
        walkable=tuple(walkable),
        goals=tuple(goals),
        spawns=tuple(spawns),
        metadata=dict(metadata),
    )
    (all_segs, all_ranks, all_owner), (obj_segs, obj_ranks, obj_owner) = _bake(
        scene.objects, scene.walkable
    )
    object.__setattr__(scene, "_all_segs", all_segs)
    object.__setattr__(scene, "_all_ranks", all_ranks)
    object.__setattr__(scene, "_all_owner", all_owner)
    object.__setattr__(scene, "_obj_segs", obj_segs)
    object.__setattr__(scene, "_obj_ranks", obj_ranks)
    object.__setattr__(scene, "_obj_owner", obj_owner)
    for spawn in scene.spawns:
        if not contains_walkable(scene, spawn.pose.position):
            raise SceneValidationError(spawn.id, "spawn pose is not on walkable ground")
    for g in scene.goals:
        if not any(geometry.polygons_overlap(g.polygon, w) for w in scene.walkable):
            raise SceneValidationError(g.id, "goal polygon does not touch the walkable region")
    return scene


def contains_walkable(scene, point):
    """True iff the point is on walkable ground.

    Boundary-inclusive: on a walkable polygon's edge counts as walkable,
    on or inside any object footprint does not.
    """
    px = np.array([point[0]], dtype=np.float64)
    py = np.array([point[1]], dtype=np.float64)
    if not any(bool(kernels.points_in_polygon(px, py, w)[0]) for w in scene.walkable):
        return False
    for obj in scene.objects:
        if bool(kernels.points_in_polygon(px, py, obj.footprint)[0]):
            return False
    return True


def raycast(scene, origin, direction, max_range):
    """Nearest hit along a ray against footprints and the walkable boundary.

    ``direction`` must be a unit vector (within 1e-9).  Exact distance ties
    go to the lower object id; the walkable boundary loses ties and reports
    class ``wall`` with no caption.  Returns None when nothing lies within
    ``max_range``.
    """
    norm = math.hypot(direction[0], direction[1])
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("direction must have unit norm")
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    dirs = np.array([[direction[0], direction[1]]], dtype=np.float64)
    t, idx = kernels.cast_rays(
        origin[0], origin[1], dirs, scene._all_segs, scene._all_ranks, max_range
    )
    if idx[0] < 0:
        return None
    owner = scene._all_owner[idx[0]]
    if owner < 0:
        return RayHit("wall", None, float(t[0]))
    obj = scene.objects[owner]
    return RayHit(obj.label, obj.caption, float(t[0]))


def visible_objects(scene, pose, fov, max_range):
    """Objects visible from a pose, nearest first.

    Visibility is decided by a fan of rays at 1-degree increments across
    the field of view; an object is visible where it is the nearest
    footprint hit on at least one ray.  Only object footprints occlude
    (the walkable boundary is a movement constraint, not an opaque
    surface).  Equal-distance entries are ordered by object id.
    """
    if not (0 < fov <= 180):
        raise ValueError("fov must be in (0, 180]")
    if scene._obj_segs.shape[0] == 0:
        return []
    step = 1.0
    n = int(round(fov / step)) + 1
    offsets = -fov / 2.0 + step * np.arange(n)
    angles = np.radians(pose.heading + offsets)
    dirs = np.stack([np.sin(angles), np.cos(angles)], axis=1)
    t, idx = kernels.cast_rays(
        pose.x, pose.y, dirs, scene._obj_segs, scene._obj_ranks, max_range
    )
    best = {}
    counts = {}
    for r in range(n):
        if idx[r] < 0:
            continue
        owner = int(scene._obj_owner[idx[r]])
        counts[owner] = counts.get(owner, 0) + 1
        dist = float(t[r])
        if owner not in best or dist < best[owner][0]:
            best[owner] = (dist, float(offsets[r]))
    keyed = []
    for owner, (dist, bearing) in best.items():
        obj = scene.objects[owner]
        entry = VisibleObject(
            label=obj.label,
            caption=obj.caption,
            relative_bearing=bearing,
            distance=dist,
            angular_width=counts[owner] * step,
            height=obj.height,
        )
        keyed.append((dist, obj.id, entry))
    keyed.sort(key=lambda item: (item[0], item[1]))
    return [entry for _, _, entry in keyed]


# --------------------------------------------------------------------------
# Scene document I/O (schema_version 1)


def _expect(mapping, key, kind, path, required=True, default=None):
    if key not in mapping:
        if required:
            raise SceneSchemaError(f"{path}.{key}" if path else key, "missing required field")
        return default
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SceneSchemaError(
            f"{path}.{key}" if path else key,
            f"expected {kind.__name__}, got {type(value).__name__}",
        )
    return value


def _parse_points(raw, path):
    if not isinstance(raw, list) or len(raw) < 3:
        raise SceneSchemaError(path, "expected a list of at least 3 [x, y] pairs")
    pts = []
    for i, entry in enumerate(raw):
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
        ):
            raise SceneSchemaError(f"{path}[{i}]", "expected an [x, y] number pair")
        pts.append([float(entry[0]), float(entry[1])])
    return geometry.ensure_ccw(np.asarray(pts, dtype=np.float64))


def parse_scene_document(doc, scene_id):
    """Validate a parsed scene document and build the Scene."""
    if not isinstance(doc, dict):
        raise SceneSchemaError("$", "top level must be an object")
    version = _expect(doc, "schema_version", int, "")
    if version != SCHEMA_VERSION:
        raise SceneSchemaError("schema_version", f"unsupported version {version}")
    known = {"schema_version", "metadata", "objects", "walkable", "goals", "spawns"}
    for key in doc:
        if key not in known:
            raise SceneSchemaError(key, "unknown top-level field")

    metadata = _expect(doc, "metadata", dict, "", required=False, default={})
    for key, value in metadata.items():
        if not isinstance(value, str):
            raise SceneSchemaError(f"metadata.{key}", "metadata values must be strings")

    raw_objects = _expect(doc, "objects", list, "", required=False, default=[])
    objects = []
    for i, raw in enumerate(raw_objects):
        path = f"objects[{i}]"
        if not isinstance(raw, dict):
            raise SceneSchemaError(path, "expected an object entry")
        oid = _expect(raw, "id", str, path)
        label = _expect(raw, "class", str, path)
        height = _expect(raw, "height", float, path)
        caption = raw.get("caption")
        if caption is not None and not isinstance(caption, str):
            raise SceneSchemaError(f"{path}.caption", "caption must be a string or null")
        footprint = _parse_points(raw.get("footprint"), f"{path}.footprint")
        objects.append(SceneObject(oid, label, footprint, height, caption))

    raw_walkable = _expect(doc, "walkable", list, "")
    walkable = [_parse_points(poly, f"walkable[{i}]") for i, poly in enumerate(raw_walkable)]

    raw_goals = _expect(doc, "goals", list, "", required=False, default=[])
    goals = []
    for i, raw in enumerate(raw_goals):
        path = f"goals[{i}]"
        if not isinstance(raw, dict):
            raise SceneSchemaError(path, "expected a goal entry")
        goals.append(
            Goal(
                id=_expect(raw, "id", str, path),
                name=_expect(raw, "name", str, path),
                polygon=_parse_points(raw.get("polygon"), f"{path}.polygon"),
            )
        )

    raw_spawns = _expect(doc, "spawns", list, "")
    if not raw_spawns:
        raise SceneSchemaError("spawns", "at least one spawn is required")
    spawns = []
    for i, raw in enumerate(raw_spawns):
        path = f"spawns[{i}]"
        if not isinstance(raw, dict):
            raise SceneSchemaError(path, "expected a spawn entry")
        sid = _expect(raw, "id", str, path)
        pos = raw.get("position")
        if (
            not isinstance(pos, list)
            or len(pos) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pos)
        ):
            raise SceneSchemaError(f"{path}.position", "expected an [x, y] number pair")
        heading = _expect(raw, "heading", float, path)
        spawns.append(Spawn(sid, Pose(float(pos[0]), float(pos[1]), heading)))

    return build_scene(scene_id, objects, walkable, goals, spawns, metadata)


def load_scene(path):
    """Load and validate a scene document from a file path or bundled id."""
    p = Path(path)
    if not p.suffix and p.name in BUNDLED_SCENES:
        ref = resources.files("wayfarer.data.scenes") / f"{p.name}.json"
        text = ref.read_text(encoding="utf-8")
        scene_id = p.name
    else:
        if not p.exists():
            raise FileNotFoundError(f"scene file not found: {path}")
        text = p.read_text(encoding="utf-8")
        scene_id = p.stem
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneSchemaError("$", f"not valid JSON: {exc}") from exc
    return parse_scene_document(doc, scene_id)
