"""Textual senses: ray fan, view description, discovery map, compass.

Everything an agent perceives in one step is assembled here into a
:class:`SensoryFrame`.  All rendering is pure: equal inputs produce
byte-identical strings, which the prompt templates and trace files rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import geometry, scene as scene_mod
from .geometry import Pose

__all__ = [
    "Pose",
    "DiscoveryMap",
    "RayReading",
    "SensoryFrame",
    "SenseConfig",
    "cast_fan",
    "describe_view",
    "update_discovery",
    "render_discovery",
    "compass_cue",
    "sense",
    "supercover_cells",
    "FAN_OFFSETS",
    "FAN_RANGE",
    "VIEW_FOV",
    "VIEW_RANGE",
    "COLLISION_WARNING_M",
]

# Five labeled ray directions (degrees clockwise off the heading).
FAN_OFFSETS = (
    ("front", 0.0),
    ("front-left", -45.0),
    ("front-right", 45.0),
    ("left", -90.0),
    ("right", 90.0),
)
FAN_RANGE = 50.0

# Vision cone used for the textual view description.
VIEW_FOV = 120.0
VIEW_RANGE = 50.0
VIEW_MAX_CLAUSES = 8

COLLISION_WARNING_M = 1.5

DISCOVERY_WINDOW = 21  # cells per side, centered on the agent


@dataclass(frozen=True)
class RayReading:
    label: str
    distance: float


@dataclass(frozen=True)
class DiscoveryMap:
    """Visited-cell record of where the agent has walked.

    Cells are indexed (col, row) from ``origin``; ``visited`` only grows
    over a simulation and never contains out-of-bounds cells.
    """

    origin: tuple[float, float]
    cell_size: float
    width: int
    height: int
    visited: frozenset = frozenset()

    def cell_of(self, point):
        return (
            math.floor((point[0] - self.origin[0]) / self.cell_size),
            math.floor((point[1] - self.origin[1]) / self.cell_size),
        )

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    @classmethod
    def for_scene(cls, scn, cell_size=1.0, pad=2.0):
        minx, miny, maxx, maxy = scn.bounds()
        origin = (minx - pad, miny - pad)
        width = int(math.ceil((maxx - minx + 2 * pad) / cell_size))
        height = int(math.ceil((maxy - miny + 2 * pad) / cell_size))
        return cls(origin=origin, cell_size=cell_size, width=width, height=height)


@dataclass(frozen=True)
class SensoryFrame:
    view_text: str
    rays: dict
    discovery_text: str
    compass_text: str | None
    collision_warning: str | None


@dataclass(frozen=True)
class SenseConfig:
    compass_enabled: bool = True
    target: tuple[float, float] | None = None
    note: str | None = None  # extra sentence appended to the view text


def cast_fan(scn, pose):
    """Five ray casts at fixed heading offsets, 50 m range.

    Distances are kept unrounded here; renderers round to 0.1 m.
    """
    rays = {}
    for name, offset in FAN_OFFSETS:
        direction = geometry.heading_vector(pose.heading + offset)
        hit = scene_mod.raycast(scn, pose.position, direction, FAN_RANGE)
        rays[name] = RayReading(hit.label, hit.distance) if hit else None
    return rays


_BEARING_WORDS = (
    (lambda b: abs(b) <= 15.0, "ahead"),
    (lambda b: -60.0 < b < -15.0, "ahead-left"),
    (lambda b: 15.0 < b < 60.0, "ahead-right"),
    (lambda b: b <= -60.0, "to your left"),
    (lambda b: b >= 60.0, "to your right"),
)


def _bearing_word(b):
    for test, word in _BEARING_WORDS:
        if test(b):
            return word
    raise AssertionError("bearing bands must be total")


def describe_view(visible, metadata, note=None):
    """Deterministic one-paragraph view description.

    One scene-setting sentence from the metadata descriptors, then at most
    eight object clauses ordered near to far.
    """
    season = metadata.get("season", "summer")
    time_of_day = metadata.get("time_of_day", "day")
    weather = metadata.get("weather", "clear")
    locale = metadata.get("locale", "the city")
    opening = f"It is a {weather} {season} {time_of_day} in {locale}."
    if not visible:
        body = "The way ahead looks open."
    else:
        clauses = [_view_clause(entry) for entry in visible[:VIEW_MAX_CLAUSES]]
        body = "You see " + "; ".join(clauses) + "."
    text = f"{opening} {body}"
    if note:
        text = f"{text} {note}"
    return text


def _view_clause(entry):
    tall = " tall" if entry.height >= scene_mod.TALL_HEIGHT_M else ""
    caption = f' marked "{entry.caption}"' if entry.caption else ""
    word = _bearing_word(entry.relative_bearing)
    return f"a{tall} {entry.label}{caption} {word} at about {entry.distance:.1f} m"


def supercover_cells(start, end, origin, cell_size):
    """Every grid cell whose closed extent the segment start-end touches.

    Amanatides & Woo traversal with corner handling: when the segment
    passes exactly through a lattice corner, both side cells are included
    as well as the diagonal step.  Endpoints contribute their containing
    (floor) cell only.  Returns cells in traversal order.
    """
    gx0 = (start[0] - origin[0]) / cell_size
    gy0 = (start[1] - origin[1]) / cell_size
    gx1 = (end[0] - origin[0]) / cell_size
    gy1 = (end[1] - origin[1]) / cell_size
    cx, cy = math.floor(gx0), math.floor(gy0)
    ex, ey = math.floor(gx1), math.floor(gy1)
    cells = [(cx, cy)]
    dx = gx1 - gx0
    dy = gy1 - gy0
    if cx == ex and cy == ey:
        return cells
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    if dx != 0.0:
        next_vx = cx + 1 if dx > 0 else cx
        t_max_x = (next_vx - gx0) / dx
        t_dx = abs(1.0 / dx)
    else:
        t_max_x = math.inf
        t_dx = math.inf
    if dy != 0.0:
        next_vy = cy + 1 if dy > 0 else cy
        t_max_y = (next_vy - gy0) / dy
        t_dy = abs(1.0 / dy)
    else:
        t_max_y = math.inf
        t_dy = math.inf
    guard = 0
    limit = 4 * (abs(ex - cx) + abs(ey - cy) + 2)
    while (cx, cy) != (ex, ey) and guard < limit:
        guard += 1
        if t_max_x < t_max_y:
            cx += step_x
            t_max_x += t_dx
        elif t_max_y < t_max_x:
            cy += step_y
            t_max_y += t_dy
        else:
            # Exact corner crossing: the segment touches both side cells.
            cells.append((cx + step_x, cy))
            cells.append((cx, cy + step_y))
            cx += step_x
            cy += step_y
            t_max_x += t_dx
            t_max_y += t_dy
        cells.append((cx, cy))
    return cells


def update_discovery(dmap, from_pose, to_pose):
    """New map with every cell crossed by the movement segment marked."""
    cells = supercover_cells(
        from_pose.position, to_pose.position, dmap.origin, dmap.cell_size
    )
    fresh = {c for c in cells if dmap.in_bounds(c)}
    if fresh <= dmap.visited:
        return dmap
    return replace(dmap, visited=dmap.visited | fresh)


_HEADING_GLYPHS = ("^", ">", "v", "<")


def heading_glyph(heading):
    """Nearest cardinal glyph; ties on the 45-degree boundaries round clockwise."""
    return _HEADING_GLYPHS[int(((heading + 45.0) % 360.0) // 90.0)]


def render_discovery(dmap, pose):
    """ASCII window on the discovery map, centered on the agent.

    Rows run north to south; ``.`` unexplored, ``o`` visited, and the
    agent's cell shows its heading glyph.  Cells outside the map render
    as unexplored.
    """
    acx, acy = dmap.cell_of(pose.position)
    half = DISCOVERY_WINDOW // 2
    legend = (
        f"Discovery map {DISCOVERY_WINDOW}x{DISCOVERY_WINDOW}"
        " (^>v< you, o visited, . unexplored):"
    )
    lines = [legend]
    for row in range(acy + half, acy - half - 1, -1):
        chars = []
        for col in range(acx - half, acx + half + 1):
            if (col, row) == (acx, acy):
                chars.append(heading_glyph(pose.heading))
            elif (col, row) in dmap.visited:
                chars.append("o")
            else:
                chars.append(".")
        lines.append("".join(chars))
    return "\n".join(lines)


_COMPASS_BANDS = (
    (lambda b: abs(b) <= 15.0, "ahead"),
    (lambda b: -60.0 < b < -15.0, "ahead-left"),
    (lambda b: 15.0 < b < 60.0, "ahead-right"),
    (lambda b: -120.0 < b <= -60.0, "left"),
    (lambda b: 60.0 <= b < 120.0, "right"),
)


def compass_band(b):
    """Band word for a relative bearing in (-180, 180]."""
    for test, word in _COMPASS_BANDS:
        if test(b):
            return word
    return "behind"


def compass_cue(pose, target):
    """Relative-bearing hint toward a target point."""
    if (pose.x, pose.y) == tuple(target):
        raise ValueError("compass target coincides with the agent position")
    bearing = geometry.bearing_to(pose.position, target)
    b = geometry.relative_bearing(bearing, pose.heading)
    distance = math.hypot(target[0] - pose.x, target[1] - pose.y)
    rounded = int(round(b))
    dist5 = int(round(distance / 5.0) * 5)
    return f"target is {compass_band(b)} ({rounded}°), roughly {dist5} m away"


def sense(scn, pose, dmap, config):
    """Assemble the full sensory bundle for one step."""
    visible = scene_mod.visible_objects(scn, pose, VIEW_FOV, VIEW_RANGE)
    view_text = describe_view(visible, scn.metadata, note=config.note)
    rays = cast_fan(scn, pose)
    discovery_text = render_discovery(dmap, pose)
    compass_text = None
    if (
        config.compass_enabled
        and config.target is not None
        and tuple(config.target) != pose.position  # standing on the target: no direction to give
    ):
        compass_text = compass_cue(pose, config.target)
    warning = None
    front = rays["front"]
    if front is not None and front.distance < COLLISION_WARNING_M:
        warning = f"Warning: {front.label} {front.distance:.1f} m ahead"
    return SensoryFrame(
        view_text=view_text,
        rays=rays,
        discovery_text=discovery_text,
        compass_text=compass_text,
        collision_warning=warning,
    )
