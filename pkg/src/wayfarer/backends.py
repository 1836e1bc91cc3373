"""Completion providers: scripted and heuristic for tests, HTTP for real LLMs.

The scripted and heuristic providers are fully deterministic given their
configuration, so the whole simulation loop and every analysis can run with
zero network access.  The HTTP provider speaks the common chat-completions
wire shape; endpoint and model are configuration, never code.
"""

from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass

import requests

from .errors import BackendError, ConfigError
from .sensors import FAN_RANGE

API_KEY_ENV = "TA_API_KEY"


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    user: str
    temperature: float = 0.0
    seed: int | None = None
    max_tokens: int = 512

    def __post_init__(self):
        if not self.system or not self.user:
            raise ValueError("system and user text must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


_TAG_RE = re.compile(r"\[stage=(\w+) step=(\d+) prompts=", re.MULTILINE)


def _stage_and_step(request):
    m = _TAG_RE.search(request.system)
    if not m:
        raise ConfigError("system text carries no stage tag")
    return m.group(1), int(m.group(2))


class ScriptedBackend:
    """Replays canned text keyed by (stage, step index), with regex fallbacks.

    ``script`` maps (stage, step) or (stage, "*") to response text;
    ``rules`` is an ordered list of (stage_or_*, pattern, response) matched
    against the user text when the table misses.
    """

    name = "scripted"

    def __init__(self, script=None, rules=None):
        self.script = dict(script or {})
        self.rules = [(s, re.compile(p), r) for s, p, r in (rules or [])]

    def complete(self, request):
        stage, step = _stage_and_step(request)
        if (stage, step) in self.script:
            return self.script[(stage, step)]
        if (stage, "*") in self.script:
            return self.script[(stage, "*")]
        for rule_stage, pattern, response in self.rules:
            if rule_stage in (stage, "*") and pattern.search(request.user):
                return response
        raise ConfigError(f"scripted backend has no entry for stage '{stage}' step {step}")


_SECTION_RE = re.compile(r"^## (.+)$", re.MULTILINE)
_RAY_RE = re.compile(r"^(front|front-left|front-right|left|right): (?:([a-z-]+) ([0-9.]+) m|clear)$")
_COMPASS_RE = re.compile(r"^target is (ahead-left|ahead-right|ahead|left|right|behind) \(")


def _split_sections(user_text):
    sections = {}
    matches = list(_SECTION_RE.finditer(user_text))
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(user_text)
        sections[m.group(1)] = user_text[m.end():end].strip()
    return sections


class HeuristicBackend:
    """Rule-based policy over the rendered sensory sections.

    Exists so the full closed loop runs deterministically offline.  The
    decide stage applies a fixed-order rule table; observe and plan emit
    template sentences summarizing the frame.
    """

    name = "heuristic"

    def __init__(self, goal_phrase="Subway"):
        self.goal_phrase = goal_phrase

    def complete(self, request):
        stage, _ = _stage_and_step(request)
        frame = self._parse_frame(request.user)
        if stage == "observe":
            return self._observe(frame)
        if stage == "plan":
            return self._plan(frame)
        if stage == "decide":
            return self._decide(frame)
        raise ConfigError(f"heuristic backend cannot serve stage '{stage}'")

    def _parse_frame(self, user_text):
        sections = _split_sections(user_text)
        if "View" not in sections or "Rays" not in sections:
            raise ConfigError("user text is missing the sensory frame sections")
        rays = {}
        for line in sections["Rays"].splitlines():
            m = _RAY_RE.match(line.strip())
            if not m:
                raise ConfigError(f"unparseable ray line: {line!r}")
            rays[m.group(1)] = (m.group(2), float(m.group(3))) if m.group(2) else None
        if set(rays) != {"front", "front-left", "front-right", "left", "right"}:
            raise ConfigError("ray section must carry exactly the five directions")
        band = None
        if "Compass" in sections:
            m = _COMPASS_RE.match(sections["Compass"])
            if not m:
                raise ConfigError(f"unparseable compass line: {sections['Compass']!r}")
            band = m.group(1)
        return {
            "view": sections["View"],
            "rays": rays,
            "band": band,
            "warning": sections.get("Warning"),
        }

    @staticmethod
    def _clearance(rays, name):
        reading = rays[name]
        return reading[1] if reading is not None else FAN_RANGE

    def _observe(self, frame):
        front = frame["rays"]["front"]
        if front is None:
            clearance = "The way ahead is clear for at least 50 m."
        else:
            clearance = f"The nearest thing ahead is a {front[0]} about {front[1]:.1f} m away."
        return f"I look around. {frame['view']} {clearance}"

    def _plan(self, frame):
        if frame["band"] is not None:
            return (
                f"The target is {frame['band']} of me. "
                f"I will work my way {frame['band']} while keeping clear of obstacles."
            )
        return "Without a compass I will keep to open ground and look for my goal."

    def _decide(self, frame):
        rays = frame["rays"]
        band = frame["band"]
        front = self._clearance(rays, "front")
        # Rule 1: target ahead (or no compass at all) and room to walk.
        if (band is None or band == "ahead") and front >= 5.0:
            length = min(front - 2.0, 10.0)
            return f"ACTION: move forward\nLENGTH: {length:g}"
        # Rule 2: about to collide; turn toward the clearer side.
        if frame["warning"] is not None:
            left = self._clearance(rays, "left")
            right = self._clearance(rays, "right")
            side = "turn left" if left >= right else "turn right"
            return f"ACTION: {side}\nANGLE: 45"
        # Rule 3: steer toward the compass band.
        if band in ("left", "ahead-left"):
            return "ACTION: turn left\nANGLE: 45"
        if band in ("right", "ahead-right"):
            return "ACTION: turn right\nANGLE: 45"
        # Rule 4: the goal is in sight and close ahead.
        if self.goal_phrase.lower() in frame["view"].lower() and front <= 10.0:
            return "ACTION: finish"
        # Rule 5: reorient.
        return "ACTION: search"


class HttpBackend:
    """Generic chat-completions provider.

    POSTs to ``{endpoint}/chat/completions`` with a bearer token from the
    ``TA_API_KEY`` environment variable.  Retries are bounded (3 attempts,
    0.5/1/2 s backoff) and a failed request never corrupts simulation
    state; the caller aborts the step cleanly.
    """

    name = "http"

    def __init__(self, endpoint, model, timeout=60.0, max_attempts=3,
                 backoff=(0.5, 1.0, 2.0), max_inflight=4, session=None):
        if not endpoint or not model:
            raise ConfigError("http backend needs endpoint and model")
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._gate = threading.Semaphore(max_inflight)
        self._session = session or requests.Session()

    def complete(self, request):
        payload = {
            "model": self.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        if request.seed is not None:
            payload["seed"] = request.seed
        headers = {}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        url = f"{self.endpoint}/chat/completions"
        last_error = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                with self._gate:
                    response = self._session.post(
                        url, json=payload, headers=headers, timeout=self.timeout
                    )
                if response.status_code != 200:
                    raise BackendError(
                        f"HTTP {response.status_code} from {url}", attempts=attempt
                    )
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except BackendError as exc:
                last_error = exc
            except (requests.RequestException, KeyError, ValueError, IndexError) as exc:
                last_error = BackendError(f"transport error: {exc}", attempts=attempt)
            if attempt < self.max_attempts:
                time.sleep(self.backoff[min(attempt - 1, len(self.backoff) - 1)])
        last_error.attempts = self.max_attempts
        raise last_error


BACKEND_KINDS = ("scripted", "heuristic", "http")


def make_backend(config):
    """Build a provider from a config mapping ({"kind": ..., ...})."""
    if not isinstance(config, dict) or "kind" not in config:
        raise ConfigError("backend config needs a 'kind' field")
    kind = config["kind"]
    options = {k: v for k, v in config.items() if k != "kind"}
    if kind == "scripted":
        script = {}
        for entry in options.pop("script", []):
            step = entry.get("step", "*")
            script[(entry["stage"], step)] = entry["text"]
        rules = [(r["stage"], r["pattern"], r["text"]) for r in options.pop("rules", [])]
        if options:
            raise ConfigError(f"unknown scripted backend options: {sorted(options)}")
        return ScriptedBackend(script, rules)
    if kind == "heuristic":
        phrase = options.pop("goal_phrase", "Subway")
        if options:
            raise ConfigError(f"unknown heuristic backend options: {sorted(options)}")
        return HeuristicBackend(goal_phrase=phrase)
    if kind == "http":
        try:
            return HttpBackend(
                endpoint=options.pop("endpoint"),
                model=options.pop("model"),
                timeout=options.pop("timeout", 60.0),
                max_inflight=options.pop("max_inflight", 4),
            )
        except KeyError as exc:
            raise ConfigError(f"http backend config missing {exc}") from exc
    raise ConfigError(f"unknown backend kind '{kind}'")
