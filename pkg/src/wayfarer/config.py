"""Run and matrix configuration files (strict JSON documents)."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from . import backends as backends_mod
from . import scene as scene_mod
from .agent import Persona, TaskSpec
from .errors import ConfigError
from .sim import ScenarioSpec

CONFIG_SCHEMA_VERSION = 1

_RUN_KEYS = {
    "schema_version", "scene", "spawn", "label", "rng_seed",
    "backend", "persona", "task", "memory_seed", "meta",
}
_TASK_KEYS = {"objective", "subtasks", "step_limit", "compass_enabled", "goal_id"}
_PERSONA_KEYS = {"description", "attributes"}
_MATRIX_KEYS = {
    "schema_version", "count", "base_seed", "backend", "task", "scenes", "personas",
}
_SCENE_ENTRY_KEYS = {"scene", "label", "season", "location", "time", "spawn"}


def _load_json(path):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")


def _parse_task(doc, where="task"):
    _check_keys(doc, _TASK_KEYS, where)
    try:
        return TaskSpec(
            objective=doc["objective"],
            subtasks=tuple(doc.get("subtasks", ())),
            step_limit=int(doc.get("step_limit", 30)),
            compass_enabled=bool(doc.get("compass_enabled", True)),
            goal_id=doc.get("goal_id", ""),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_persona(doc, where="persona"):
    _check_keys(doc, _PERSONA_KEYS, where)
    try:
        return Persona(
            description=doc["description"],
            attributes=dict(doc.get("attributes", {})),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _resolve_scene(ref):
    try:
        return scene_mod.load_scene(ref)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from exc


def load_run_config(path, seed=None, backend_kind=None):
    """Parse a single-run config into a ScenarioSpec.

    ``seed`` and ``backend_kind`` are command-line overrides.
    """
    doc = _load_json(path)
    _check_keys(doc, _RUN_KEYS, str(path))
    if doc.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    for key in ("scene", "spawn", "label", "rng_seed", "backend", "persona", "task"):
        if key not in doc:
            raise ConfigError(f"{path}: missing required key '{key}'")
    backend_cfg = dict(doc["backend"])
    if backend_kind is not None:
        backend_cfg = {"kind": backend_kind, **{k: v for k, v in backend_cfg.items() if k != "kind"}}
        if backend_kind != doc["backend"].get("kind"):
            backend_cfg = {"kind": backend_kind}
    backend = backends_mod.make_backend(backend_cfg)
    scene = _resolve_scene(doc["scene"])
    task = _parse_task(doc["task"])
    if task.goal_id:
        try:
            scene.goal(task.goal_id)
        except KeyError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    try:
        scene.spawn(doc["spawn"])
    except KeyError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    persona = _parse_persona(doc["persona"])
    meta = dict(doc.get("meta", {}))
    meta.setdefault("persona", persona.description)
    return ScenarioSpec(
        scene_id=scene.scene_id,
        scene=scene,
        spawn=doc["spawn"],
        persona=persona,
        task=task,
        backend=backend,
        backend_kind=backend_cfg["kind"],
        rng_seed=int(seed if seed is not None else doc["rng_seed"]),
        label=doc["label"],
        memory_seed=doc.get("memory_seed"),
        meta=meta,
    )


def load_matrix_config(path, seed=None, backend_kind=None):
    """Expand a matrix config into a list of ScenarioSpecs.

    The scene x persona grid is walked round-robin until ``count`` specs
    exist; spec i draws seed ``base_seed + i``.
    """
    doc = _load_json(path)
    _check_keys(doc, _MATRIX_KEYS, str(path))
    if doc.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    for key in ("count", "base_seed", "backend", "task", "scenes", "personas"):
        if key not in doc:
            raise ConfigError(f"{path}: missing required key '{key}'")
    count = int(doc["count"])
    if count < 1:
        raise ConfigError(f"{path}: count must be >= 1")
    if not doc["scenes"] or not doc["personas"]:
        raise ConfigError(f"{path}: scenes and personas must be non-empty")
    backend_cfg = dict(doc["backend"])
    if backend_kind is not None:
        backend_cfg = {"kind": backend_kind}
    backend = backends_mod.make_backend(backend_cfg)
    task = _parse_task(doc["task"])
    base_seed = int(seed if seed is not None else doc["base_seed"])

    scenes = []
    for i, entry in enumerate(doc["scenes"]):
        _check_keys(entry, _SCENE_ENTRY_KEYS, f"{path}: scenes[{i}]")
        scenes.append((entry, _resolve_scene(entry["scene"])))
    personas = [_parse_persona(p, f"{path}: personas[{i}]") for i, p in enumerate(doc["personas"])]

    combos = [(entry, scn, persona) for entry, scn in scenes for persona in personas]
    specs = []
    for i in range(count):
        entry, scn, persona = combos[i % len(combos)]
        if task.goal_id:
            scn.goal(task.goal_id)  # KeyError -> genuine config mistake
        meta = {
            "season": entry.get("season", ""),
            "location": entry.get("location", ""),
            "time": entry.get("time", ""),
            "persona": persona.description,
        }
        specs.append(
            ScenarioSpec(
                scene_id=scn.scene_id,
                scene=scn,
                spawn=entry.get("spawn", "default"),
                persona=persona,
                task=task,
                backend=backend,
                backend_kind=backend_cfg["kind"],
                rng_seed=base_seed + i,
                label=entry["label"],
                memory_seed=None,
                meta=meta,
            )
        )
    return specs


def bundled_matrix_path():
    return resources.files("wayfarer.data.matrix") / "train_station.json"


def bundled_run_config_path():
    return resources.files("wayfarer.data.configs") / "run_kendall_base.json"
