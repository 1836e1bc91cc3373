"""Deterministic pedestrian-agent wayfinding simulator and analysis tools.

Agents perceive a semantic 2.5D scene through ray-cast senses, a discovery
map, and a compass cue; reason in three staged prompts (observe, plan,
decide); act through a key-value action grammar; and leave trace files that
feed spatial, term-frequency, topic, and sentiment analyses.
"""

__version__ = "0.1.0"

from .geometry import Pose
from .scene import Scene, load_scene, contains_walkable, raycast, visible_objects
from .sensors import DiscoveryMap, SensoryFrame, sense
from .agent import Action, Persona, TaskSpec, parse_action
from .sim import ScenarioSpec, SimulationResult, StepRecord, run, run_matrix

__all__ = [
    "Pose",
    "Scene",
    "load_scene",
    "contains_walkable",
    "raycast",
    "visible_objects",
    "DiscoveryMap",
    "SensoryFrame",
    "sense",
    "Action",
    "Persona",
    "TaskSpec",
    "parse_action",
    "ScenarioSpec",
    "SimulationResult",
    "StepRecord",
    "run",
    "run_matrix",
]
