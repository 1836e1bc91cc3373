"""Agent-side pieces: persona, task, memory, prompts, and the action grammar.

The three reasoning stages (observe, plan, decide) each get a prompt built
from a versioned template set; the decide stage embeds the key-value action
grammar that any completion provider must emit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import ActionParseError, StageError
from .sensors import FAN_OFFSETS, SensoryFrame

PROMPT_VERSION = "v1"

STAGES = ("observe", "plan", "decide")

MOVE_MIN_M, MOVE_MAX_M = 0.1, 50.0
TURN_MIN_DEG, TURN_MAX_DEG = 1.0, 180.0
DEFAULT_MOVE_M = 2.0
DEFAULT_TURN_DEG = 45.0

ACTION_KINDS = ("move_forward", "turn_left", "turn_right", "search", "finish")

MEMORY_BUDGET = 4000
MEMORY_ELISION_HEADER = "(earlier steps elided)"


@dataclass(frozen=True)
class Persona:
    description: str
    attributes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.description.strip():
            raise ValueError("persona description must be non-empty")


@dataclass(frozen=True)
class TaskSpec:
    objective: str
    subtasks: tuple = ()
    step_limit: int = 30
    compass_enabled: bool = True
    goal_id: str = ""

    def __post_init__(self):
        if self.step_limit < 1:
            raise ValueError("step_limit must be >= 1")
        object.__setattr__(self, "subtasks", tuple(self.subtasks))


@dataclass(frozen=True)
class MemoryStream:
    text: str = ""
    budget: int = MEMORY_BUDGET


@dataclass(frozen=True)
class Action:
    kind: str
    magnitude: float | None = None

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind '{self.kind}'")
        if self.kind == "move_forward":
            if self.magnitude is None or not (MOVE_MIN_M <= self.magnitude <= MOVE_MAX_M):
                raise ValueError("move_forward needs a magnitude in [0.1, 50] m")
        elif self.kind in ("turn_left", "turn_right"):
            if self.magnitude is None or not (TURN_MIN_DEG <= self.magnitude <= TURN_MAX_DEG):
                raise ValueError("turns need a magnitude in [1, 180] degrees")
        elif self.magnitude is not None:
            raise ValueError(f"{self.kind} takes no magnitude")


@dataclass(frozen=True)
class CotOutputs:
    observation: str
    plan: str
    decision_raw: str
    action: Action


@dataclass(frozen=True)
class Prompt:
    stage: str
    step_index: int
    system: str
    user: str


# --------------------------------------------------------------------------
# Action grammar

_VERBS = {
    "move_forward": "move_forward",
    "move forward": "move_forward",
    "turn_left": "turn_left",
    "turn left": "turn_left",
    "turn_right": "turn_right",
    "turn right": "turn_right",
    "search": "search",
    "finish": "finish",
}

_ACTION_RE = re.compile(r"^\s*action\s*:\s*(.+?)\s*$", re.IGNORECASE)
_LENGTH_RE = re.compile(
    r"^\s*length\s*:\s*([-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*(?:m|meter|meters)?\s*$",
    re.IGNORECASE,
)
_ANGLE_RE = re.compile(
    r"^\s*angle\s*:\s*([-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*(?:deg|degree|degrees|°)?\s*$",
    re.IGNORECASE,
)


def _clamp(value, lo, hi):
    return min(hi, max(lo, value))


def parse_action(decision_raw):
    """Parse decision text against the key-value grammar.

    Lines are matched case-insensitively; the first ACTION line wins.
    Missing LENGTH defaults to 2 m, missing ANGLE to 45 degrees; magnitudes
    are clamped into their legal ranges.  Raises :class:`ActionParseError`
    when there is no ACTION line or the verb is unknown.
    """
    if not isinstance(decision_raw, str):
        raise ActionParseError("decision is not text")
    verb = None
    length = None
    angle = None
    for line in decision_raw.splitlines():
        if verb is None:
            m = _ACTION_RE.match(line)
            if m:
                candidate = m.group(1).strip().lower()
                if candidate not in _VERBS:
                    raise ActionParseError(f"unknown action verb '{m.group(1).strip()}'")
                verb = _VERBS[candidate]
                continue
        if length is None:
            m = _LENGTH_RE.match(line)
            if m:
                length = float(m.group(1))
                continue
        if angle is None:
            m = _ANGLE_RE.match(line)
            if m:
                angle = float(m.group(1))
    if verb is None:
        raise ActionParseError("no ACTION line found")
    if verb == "move_forward":
        magnitude = _clamp(length if length is not None else DEFAULT_MOVE_M, MOVE_MIN_M, MOVE_MAX_M)
        return Action("move_forward", magnitude)
    if verb in ("turn_left", "turn_right"):
        magnitude = _clamp(angle if angle is not None else DEFAULT_TURN_DEG, TURN_MIN_DEG, TURN_MAX_DEG)
        return Action(verb, magnitude)
    return Action(verb)


def render_action(action):
    """Canonical grammar text for an action; parse_action inverts this."""
    if action.kind == "move_forward":
        return f"ACTION: move_forward\nLENGTH: {action.magnitude!r} meters"
    if action.kind in ("turn_left", "turn_right"):
        return f"ACTION: {action.kind}\nANGLE: {action.magnitude!r} degrees"
    return f"ACTION: {action.kind}"


def action_phrase(action):
    """Short human phrase used in memory lines and reports."""
    if action.kind == "move_forward":
        return f"move forward {action.magnitude:g} m"
    if action.kind == "turn_left":
        return f"turn left {action.magnitude:g}°"
    if action.kind == "turn_right":
        return f"turn right {action.magnitude:g}°"
    return action.kind


# --------------------------------------------------------------------------
# Prompt templates (version v1)

GRAMMAR_SPEC = (
    "Reply with exactly these lines:\n"
    "ACTION: one of move_forward | turn_left | turn_right | search | finish\n"
    "LENGTH: <number> meters   (only with move_forward; 0.1 to 50)\n"
    "ANGLE: <number> degrees   (only with turn_left or turn_right; 1 to 180)\n"
    "Use finish only when you believe you are at your goal."
)

_STAGE_INSTRUCTIONS = {
    "observe": "Describe what you notice around you in two to four sentences.",
    "plan": "Given your observation and memory, state your short-term plan in one to three sentences.",
    "decide": GRAMMAR_SPEC,
}

_FAMILIAR_LINE = "You know this area well."
_UNFAMILIAR_LINE = "This area is unfamiliar; rely on what you can see and remember."


def build_system_text(stage, persona, task, step_index):
    familiarity = _FAMILIAR_LINE if task.compass_enabled else _UNFAMILIAR_LINE
    return (
        f"You are {persona.description}, walking through a real urban environment.\n"
        f"{familiarity}\n"
        f"Your task: {task.objective}\n"
        "Move only where the way is open, one action per step.\n"
        f"[stage={stage} step={step_index} prompts={PROMPT_VERSION}]"
    )


def render_rays(rays):
    lines = []
    for name, _ in FAN_OFFSETS:
        reading = rays[name]
        if reading is None:
            lines.append(f"{name}: clear")
        else:
            lines.append(f"{name}: {reading.label} {reading.distance:.1f} m")
    return "\n".join(lines)


def build_user_text(stage, memory, frame, prior_observation=None, prior_plan=None):
    sections = []
    sections.append("## Memory\n" + (memory.text if memory.text else "(empty)"))
    sections.append("## View\n" + frame.view_text)
    sections.append("## Rays\n" + render_rays(frame.rays))
    sections.append("## Discovery map\n" + frame.discovery_text)
    if frame.compass_text is not None:
        sections.append("## Compass\n" + frame.compass_text)
    if frame.collision_warning is not None:
        sections.append("## Warning\n" + frame.collision_warning)
    if stage in ("plan", "decide"):
        sections.append("## Observation\n" + (prior_observation or ""))
    if stage == "decide":
        sections.append("## Plan\n" + (prior_plan or ""))
    sections.append("## Instructions\n" + _STAGE_INSTRUCTIONS[stage])
    return "\n\n".join(sections)


def build_prompt(stage, persona, task, memory, frame, step_index,
                 prior_observation=None, prior_plan=None):
    """Deterministic prompt pair for one reasoning stage."""
    if stage not in STAGES:
        raise ValueError(f"unknown stage '{stage}'")
    if stage in ("plan", "decide") and prior_observation is None:
        raise ValueError(f"stage '{stage}' needs the observation text")
    if stage == "decide" and prior_plan is None:
        raise ValueError("stage 'decide' needs the plan text")
    return Prompt(
        stage=stage,
        step_index=step_index,
        system=build_system_text(stage, persona, task, step_index),
        user=build_user_text(stage, memory, frame, prior_observation, prior_plan),
    )


def run_stage(backend, prompt, temperature=0.0, seed=None, max_tokens=512):
    """Run one stage on a completion provider; errors carry the stage name."""
    from .backends import CompletionRequest

    request = CompletionRequest(
        system=prompt.system,
        user=prompt.user,
        temperature=temperature,
        seed=seed,
        max_tokens=max_tokens,
    )
    try:
        return backend.complete(request).strip()
    except Exception as exc:
        raise StageError(prompt.stage, exc) from exc


# --------------------------------------------------------------------------
# Memory stream

def first_sentence(text, cap=200):
    """Text up to and including the first period, newlines flattened."""
    flat = " ".join(text.split())
    dot = flat.find(".")
    sentence = flat[: dot + 1] if dot >= 0 else flat
    return sentence[:cap]


def memory_line(step_index, action, observation):
    return f"step {step_index}: {action_phrase(action)}; noted: {first_sentence(observation)}"


def update_memory(memory, step_index, action, observation, plan):
    """Append one summary line, evicting the oldest lines past the budget.

    The newest line is never evicted; when over budget the oldest summary
    lines are dropped behind a fixed elision header until the text fits.
    """
    lines = memory.text.splitlines() if memory.text else []
    if lines and lines[0] == MEMORY_ELISION_HEADER:
        lines = lines[1:]
    lines.append(memory_line(step_index, action, observation))
    text = "\n".join(lines)
    if len(text) <= memory.budget:
        return replace(memory, text=text)
    while len(lines) > 1:
        lines = lines[1:]
        text = "\n".join([MEMORY_ELISION_HEADER] + lines)
        if len(text) <= memory.budget:
            return replace(memory, text=text)
    newest = lines[-1]
    keep = memory.budget - len(MEMORY_ELISION_HEADER) - 1
    return replace(memory, text="\n".join([MEMORY_ELISION_HEADER, newest[:max(keep, 0)]]))


def seeded_memory(seed_text, budget=MEMORY_BUDGET):
    """Initial memory, optionally pre-seeded with prior knowledge."""
    text = (seed_text or "").strip()
    return MemoryStream(text=text[:budget], budget=budget)
