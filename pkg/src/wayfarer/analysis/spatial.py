"""Spatial analysis: per-run paths, decision points, aggregation grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import sim as sim_mod

DEFAULT_CELL_M = 2.0


@dataclass(frozen=True)
class SimPath:
    sim_id: str
    label: str
    scene_id: str
    outcome: str  # success | failure
    polyline: tuple            # pose_after positions, in step order
    decision_points: tuple     # pose_before positions, one per step
    turn_flags: tuple          # True where the step was a turn or search
    search_flags: tuple
    finish_flags: tuple


def extract_paths(results, sim_ids=None):
    """Polyline plus decision points for each simulation."""
    paths = []
    for i, result in enumerate(results):
        sim_id = sim_ids[i] if sim_ids else f"{result.label}-{i:03d}"
        polyline = tuple((s.pose_after.x, s.pose_after.y) for s in result.steps)
        decisions = tuple((s.pose_before.x, s.pose_before.y) for s in result.steps)
        kinds = [s.outputs.action.kind for s in result.steps]
        paths.append(
            SimPath(
                sim_id=sim_id,
                label=result.label,
                scene_id=str(result.meta.get("scene_id", "")),
                outcome="success" if result.completed else "failure",
                polyline=polyline,
                decision_points=decisions,
                turn_flags=tuple(k in ("turn_left", "turn_right", "search") for k in kinds),
                search_flags=tuple(k == "search" for k in kinds),
                finish_flags=tuple(k == "finish" for k in kinds),
            )
        )
    return paths


def extract_paths_from_traces(paths_to_traces):
    from pathlib import Path

    trace_paths = list(paths_to_traces)
    results = [sim_mod.read_trace(p) for p in trace_paths]
    return extract_paths(results, sim_ids=[Path(p).stem for p in trace_paths])


@dataclass(frozen=True)
class DecisionPointGrid:
    cell_size: float
    origin: tuple
    width: int
    height: int
    success: np.ndarray
    failure: np.ndarray

    def total(self):
        return int(self.success.sum() + self.failure.sum())


def aggregate(paths, cell_size=DEFAULT_CELL_M, turns_only=False):
    """2D histogram of decision locations, split by run outcome.

    All paths must come from the same scene; decision counts are conserved
    (grid total equals the number of contributing steps).
    """
    if not paths:
        raise ValueError("no paths to aggregate")
    scenes = {p.scene_id for p in paths}
    if len(scenes) > 1:
        raise ValueError(f"cannot aggregate decision points across scenes: {sorted(scenes)}")
    pts = []
    for path in paths:
        for point, is_turn in zip(path.decision_points, path.turn_flags):
            if turns_only and not is_turn:
                continue
            pts.append((point, path.outcome))
    if not pts:
        return DecisionPointGrid(cell_size, (0.0, 0.0), 1, 1,
                                 np.zeros((1, 1), dtype=np.int64),
                                 np.zeros((1, 1), dtype=np.int64))
    xs = [p[0][0] for p in pts]
    ys = [p[0][1] for p in pts]
    minx, miny = min(xs), min(ys)
    origin = (math.floor(minx / cell_size) * cell_size, math.floor(miny / cell_size) * cell_size)
    width = int(math.floor((max(xs) - origin[0]) / cell_size)) + 1
    height = int(math.floor((max(ys) - origin[1]) / cell_size)) + 1
    success = np.zeros((height, width), dtype=np.int64)
    failure = np.zeros((height, width), dtype=np.int64)
    for (x, y), outcome in pts:
        col = int(math.floor((x - origin[0]) / cell_size))
        row = int(math.floor((y - origin[1]) / cell_size))
        (success if outcome == "success" else failure)[row, col] += 1
    return DecisionPointGrid(cell_size, origin, width, height, success, failure)


def grids_by_label(paths, cell_size=DEFAULT_CELL_M, turns_only=False):
    """One decision-point grid per scenario label."""
    grouped = {}
    for path in paths:
        grouped.setdefault(path.label, []).append(path)
    return {
        label: aggregate(group, cell_size=cell_size, turns_only=turns_only)
        for label, group in grouped.items()
    }
