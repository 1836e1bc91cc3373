"""Simulation loop: sense, observe, plan, decide, execute, remember.

Runs single scenarios and scenario matrices, enforces movement physics
(collision clamping, pose safety), detects completion and stuck agents,
assigns subtasks after a successful finish, and reads/writes trace files.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from . import agent as agent_mod
from . import geometry, scene as scene_mod, sensors
from .agent import Action, CotOutputs, MemoryStream, Persona, TaskSpec
from .errors import ActionParseError, ConfigError, StageError, TraceError, WayfarerError
from .geometry import Pose
from .rng import Lcg64
from .sensors import DiscoveryMap, SenseConfig, SensoryFrame, RayReading

TRACE_SCHEMA_VERSION = 1

# Movement physics and run-control constants.
COLLISION_BUFFER_M = 0.3
GOAL_DILATION_M = 3.0
SEARCH_TURN_DEG = 90.0
STUCK_WINDOW = 8
STUCK_DISPLACEMENT_M = 0.2
DECIDE_ATTEMPTS = 3
WRONG_GOAL_NOTE = "You are not at your goal."
RETRY_NOTE = (
    "Your previous reply could not be parsed. "
    "Reply again using exactly the ACTION/LENGTH/ANGLE lines."
)

STATUS_COMPLETED = "completed"
STATUS_COMPLETED_SUBTASK = "completed_with_subtask"
STATUS_STEP_LIMIT = "step_limit_exceeded"
STATUS_STUCK = "stuck"
STATUS_BACKEND_FAILED = "backend_failed"

COMPLETED_STATUSES = (STATUS_COMPLETED, STATUS_COMPLETED_SUBTASK)

PHASE_MAIN = "main"
PHASE_SUBTASK = "subtask"


@dataclass(frozen=True)
class ScenarioSpec:
    scene_id: str
    scene: scene_mod.Scene
    spawn: str
    persona: Persona
    task: TaskSpec
    backend: object
    backend_kind: str
    rng_seed: int
    label: str
    memory_seed: str | None = None
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StepRecord:
    index: int
    pose_before: Pose
    pose_after: Pose
    frame: SensoryFrame
    outputs: CotOutputs
    collision_clamped: bool
    parse_failed: bool
    phase: str
    wall_time_ms: int


@dataclass(frozen=True)
class SimulationResult:
    status: str
    steps: tuple
    subtask: str | None
    label: str
    prompt_version: str
    meta: dict = field(default_factory=dict)

    @property
    def completed(self):
        return self.status in COMPLETED_STATUSES


def draw_subtask(subtasks, rng_seed):
    """Uniform subtask draw from the documented 64-bit linear generator."""
    return subtasks[Lcg64(rng_seed).index(len(subtasks))]


def _execute(scn, pose, action, frame):
    """Apply an action to a pose; returns (new_pose, collision_clamped)."""
    if action.kind == "move_forward":
        front = frame.rays["front"]
        clearance = front.distance - COLLISION_BUFFER_M if front is not None else math.inf
        travel = max(0.0, min(action.magnitude, clearance))
        clamped = travel < action.magnitude
        dx, dy = geometry.heading_vector(pose.heading)
        return Pose(pose.x + dx * travel, pose.y + dy * travel, pose.heading), clamped
    if action.kind == "turn_left":
        return Pose(pose.x, pose.y, pose.heading - action.magnitude), False
    if action.kind == "turn_right":
        return Pose(pose.x, pose.y, pose.heading + action.magnitude), False
    if action.kind == "search":
        return Pose(pose.x, pose.y, pose.heading + SEARCH_TURN_DEG), False
    return pose, False  # finish


def _decide(backend, persona, task, memory, frame, step_index, observation, plan):
    """Decide stage with bounded retries on grammar failures."""
    last_raw = ""
    for attempt in range(DECIDE_ATTEMPTS):
        prompt = agent_mod.build_prompt(
            "decide", persona, task, memory, frame, step_index,
            prior_observation=observation, prior_plan=plan,
        )
        if attempt > 0:
            prompt = replace(prompt, user=prompt.user + "\n\n" + RETRY_NOTE)
        last_raw = agent_mod.run_stage(backend, prompt)
        try:
            return last_raw, agent_mod.parse_action(last_raw), False
        except ActionParseError:
            continue
    return last_raw, Action("search"), True


def run_step(spec, task, pose, dmap, memory, step_index, phase, note=None):
    """One full simulation step; returns (StepRecord, pose, dmap, memory)."""
    started = time.monotonic()
    scn = spec.scene
    if task.compass_enabled and task.goal_id:
        target = geometry.polygon_centroid(scn.goal(task.goal_id).polygon)
    else:
        target = None
    frame = sensors.sense(
        scn, pose, dmap,
        SenseConfig(compass_enabled=task.compass_enabled, target=target, note=note),
    )
    observe_prompt = agent_mod.build_prompt("observe", spec.persona, task, memory, frame, step_index)
    observation = agent_mod.run_stage(spec.backend, observe_prompt)
    plan_prompt = agent_mod.build_prompt(
        "plan", spec.persona, task, memory, frame, step_index, prior_observation=observation
    )
    plan = agent_mod.run_stage(spec.backend, plan_prompt)
    decision_raw, action, parse_failed = _decide(
        spec.backend, spec.persona, task, memory, frame, step_index, observation, plan
    )
    new_pose, clamped = _execute(scn, pose, action, frame)
    new_dmap = sensors.update_discovery(dmap, pose, new_pose)
    new_memory = agent_mod.update_memory(memory, step_index, action, observation, plan)
    record = StepRecord(
        index=step_index,
        pose_before=pose,
        pose_after=new_pose,
        frame=frame,
        outputs=CotOutputs(observation, plan, decision_raw, action),
        collision_clamped=clamped,
        parse_failed=parse_failed,
        phase=phase,
        wall_time_ms=int((time.monotonic() - started) * 1000),
    )
    return record, new_pose, new_dmap, new_memory


def run(spec):
    """Run one scenario to completion.

    The main phase ends with a finish inside the goal region (dilated by
    3 m).  On success a subtask is drawn with the seeded generator and the
    run continues in the subtask phase (memory retained, compass cleared)
    until a second finish or the per-phase step limit.  A finish outside
    the goal region is recorded, injects a corrective note into the next
    frame, and the run continues.
    """
    scn = spec.scene
    task = spec.task
    if task.goal_id:
        goal = scn.goal(task.goal_id)  # raises KeyError for a bad reference
    else:
        goal = None
    pose = scn.spawn(spec.spawn).pose
    dmap = DiscoveryMap.for_scene(scn)
    dmap = replace(dmap, visited=frozenset({dmap.cell_of(pose.position)}))
    memory = agent_mod.seeded_memory(spec.memory_seed)
    records = []
    phase = PHASE_MAIN
    phase_steps = 0
    step_index = 0
    note = None
    displacements = []
    subtask_text = None
    status = None

    while status is None:
        if phase_steps >= task.step_limit:
            status = STATUS_COMPLETED if phase == PHASE_SUBTASK else STATUS_STEP_LIMIT
            break
        try:
            record, pose, dmap, memory = run_step(
                spec, task, pose, dmap, memory, step_index, phase, note
            )
        except StageError:
            status = STATUS_BACKEND_FAILED
            break
        note = None
        records.append(record)
        phase_steps += 1
        step_index += 1

        if record.outputs.action.kind == "finish":
            if phase == PHASE_MAIN:
                assert goal is not None
                at_goal = (
                    geometry.point_polygon_distance(pose.position, goal.polygon)
                    <= GOAL_DILATION_M
                )
                if at_goal:
                    if task.subtasks:
                        subtask_text = draw_subtask(task.subtasks, spec.rng_seed)
                        task = TaskSpec(
                            objective=subtask_text,
                            subtasks=(),
                            step_limit=task.step_limit,
                            compass_enabled=False,
                            goal_id=task.goal_id,
                        )
                        phase = PHASE_SUBTASK
                        phase_steps = 0
                        displacements = []
                        continue
                    status = STATUS_COMPLETED
                    break
                note = WRONG_GOAL_NOTE
            else:
                status = STATUS_COMPLETED_SUBTASK
                break

        dx = record.pose_after.x - record.pose_before.x
        dy = record.pose_after.y - record.pose_before.y
        displacements.append(math.hypot(dx, dy))
        if len(displacements) >= STUCK_WINDOW:
            window = displacements[-STUCK_WINDOW:]
            if sum(window) < STUCK_DISPLACEMENT_M:
                status = STATUS_COMPLETED if phase == PHASE_SUBTASK else STATUS_STUCK
                break

    return SimulationResult(
        status=status,
        steps=tuple(records),
        subtask=subtask_text,
        label=spec.label,
        prompt_version=agent_mod.PROMPT_VERSION,
        meta=dict(spec.meta),
    )


@dataclass(frozen=True)
class MatrixSummary:
    total: int
    completed: int
    completion_rate: float
    total_steps: int
    per_label: dict

    def rows(self, results):
        """CSV rows: label, season, location, time, persona, status, steps, completion."""
        out = []
        for res in results:
            meta = res.meta
            out.append(
                [
                    res.label,
                    meta.get("season", ""),
                    meta.get("location", ""),
                    meta.get("time", ""),
                    meta.get("persona", ""),
                    res.status,
                    len(res.steps),
                    1 if res.completed else 0,
                ]
            )
        return out


def summarize(results):
    per_label = {}
    completed = 0
    total_steps = 0
    for res in results:
        bucket = per_label.setdefault(res.label, {"total": 0, "completed": 0})
        bucket["total"] += 1
        if res.completed:
            bucket["completed"] += 1
            completed += 1
        total_steps += len(res.steps)
    total = len(results)
    return MatrixSummary(
        total=total,
        completed=completed,
        completion_rate=(completed / total) if total else 0.0,
        total_steps=total_steps,
        per_label=per_label,
    )


def _run_guarded(spec):
    try:
        return run(spec)
    except Exception:
        return SimulationResult(
            status=STATUS_BACKEND_FAILED,
            steps=(),
            subtask=None,
            label=spec.label,
            prompt_version=agent_mod.PROMPT_VERSION,
            meta=dict(spec.meta),
        )


def run_matrix(specs, parallelism=1):
    """Run every spec; individual failures never abort the matrix.

    Results come back in spec order regardless of parallelism, so equal
    inputs produce equal outputs at any worker count.
    """
    if not specs:
        raise ConfigError("matrix has no scenarios")
    if parallelism <= 1:
        results = [_run_guarded(spec) for spec in specs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_guarded, specs))
    return results, summarize(results)


# --------------------------------------------------------------------------
# Trace files (.talog): one JSON header line, one JSON line per step.


def _pose_doc(pose):
    return {"x": pose.x, "y": pose.y, "heading": pose.heading}


def _pose_from(doc):
    return Pose(doc["x"], doc["y"], doc["heading"])


def _frame_doc(frame):
    rays = {}
    for name, reading in frame.rays.items():
        rays[name] = None if reading is None else {"class": reading.label, "distance": reading.distance}
    return {
        "view_text": frame.view_text,
        "rays": rays,
        "discovery_text": frame.discovery_text,
        "compass_text": frame.compass_text,
        "collision_warning": frame.collision_warning,
    }


def _frame_from(doc):
    rays = {}
    for name, entry in doc["rays"].items():
        rays[name] = None if entry is None else RayReading(entry["class"], entry["distance"])
    return SensoryFrame(
        view_text=doc["view_text"],
        rays=rays,
        discovery_text=doc["discovery_text"],
        compass_text=doc["compass_text"],
        collision_warning=doc["collision_warning"],
    )


def _action_doc(action):
    return {"kind": action.kind, "magnitude": action.magnitude}


def _step_doc(step):
    return {
        "kind": "step",
        "index": step.index,
        "pose_before": _pose_doc(step.pose_before),
        "pose_after": _pose_doc(step.pose_after),
        "frame": _frame_doc(step.frame),
        "observation": step.outputs.observation,
        "plan": step.outputs.plan,
        "decision_raw": step.outputs.decision_raw,
        "action": _action_doc(step.outputs.action),
        "collision_clamped": step.collision_clamped,
        "parse_failed": step.parse_failed,
        "phase": step.phase,
        "wall_time_ms": step.wall_time_ms,
    }


def _dump(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def write_trace(result, path, spec=None):
    """Write a result as a .talog file (UTF-8, LF line endings)."""
    header = {
        "kind": "header",
        "schema_version": TRACE_SCHEMA_VERSION,
        "label": result.label,
        "status": result.status,
        "subtask": result.subtask,
        "prompt_version": result.prompt_version,
        "meta": result.meta,
    }
    if spec is not None:
        header["scene_id"] = spec.scene_id
        header["spawn"] = spec.spawn
        header["rng_seed"] = spec.rng_seed
        header["backend"] = spec.backend_kind
        header["persona"] = spec.persona.description
        header["step_limit"] = spec.task.step_limit
    lines = [_dump(header)]
    lines.extend(_dump(_step_doc(step)) for step in result.steps)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _require(doc, key, line_no):
    if key not in doc:
        raise TraceError(line_no, f"missing field '{key}'")
    return doc[key]


def read_trace(path):
    """Read a .talog file back into a SimulationResult."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceError(1, "empty trace file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceError(1, f"not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != "header":
        raise TraceError(1, "first line must be the trace header")
    version = header.get("schema_version")
    if version != TRACE_SCHEMA_VERSION:
        raise TraceError(1, f"unsupported trace schema_version {version!r}")
    steps = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise TraceError(line_no, "blank line inside trace")
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(line_no, f"not valid JSON: {exc}") from exc
        if doc.get("kind") != "step":
            raise TraceError(line_no, "expected a step record")
        try:
            action_doc = _require(doc, "action", line_no)
            action = Action(action_doc["kind"], action_doc.get("magnitude"))
            steps.append(
                StepRecord(
                    index=_require(doc, "index", line_no),
                    pose_before=_pose_from(_require(doc, "pose_before", line_no)),
                    pose_after=_pose_from(_require(doc, "pose_after", line_no)),
                    frame=_frame_from(_require(doc, "frame", line_no)),
                    outputs=CotOutputs(
                        observation=_require(doc, "observation", line_no),
                        plan=_require(doc, "plan", line_no),
                        decision_raw=_require(doc, "decision_raw", line_no),
                        action=action,
                    ),
                    collision_clamped=_require(doc, "collision_clamped", line_no),
                    parse_failed=doc.get("parse_failed", False),
                    phase=_require(doc, "phase", line_no),
                    wall_time_ms=_require(doc, "wall_time_ms", line_no),
                )
            )
        except TraceError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(line_no, f"malformed step record: {exc}") from exc
    meta = dict(header.get("meta", {}))
    for key in ("scene_id", "spawn", "rng_seed", "backend", "persona", "step_limit"):
        if key in header:
            meta[key] = header[key]
    return SimulationResult(
        status=_require(header, "status", 1),
        steps=tuple(steps),
        subtask=header.get("subtask"),
        label=_require(header, "label", 1),
        prompt_version=_require(header, "prompt_version", 1),
        meta=meta,
    )


def canonical_trace_hash(path):
    """SHA-256 of the trace with wall_time_ms fields zeroed."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    digest = hashlib.sha256()
    for line in lines:
        doc = json.loads(line)
        if doc.get("kind") == "step":
            doc["wall_time_ms"] = 0
        digest.update(_dump(doc).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()
