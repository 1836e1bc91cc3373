"""Completion providers: scripted table, heuristic policy rules, HTTP."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from wayfarer.backends import (
    CompletionRequest,
    HeuristicBackend,
    HttpBackend,
    ScriptedBackend,
    make_backend,
)
from wayfarer.errors import BackendError, ConfigError


def request_for(stage, step, user):
    system = f"You are someone.\n[stage={stage} step={step} prompts=v1]"
    return CompletionRequest(system=system, user=user, temperature=0.0)


def frame_user(front="clear", left="clear", right="clear", compass=None, warning=None,
               view="It is a bright summer morning in town. The way ahead looks open."):
    def ray(value):
        return value if value == "clear" else value

    sections = [
        "## Memory\n(empty)",
        f"## View\n{view}",
        "## Rays\n"
        f"front: {ray(front)}\n"
        "front-left: clear\n"
        "front-right: clear\n"
        f"left: {ray(left)}\n"
        f"right: {ray(right)}",
        "## Discovery map\nDiscovery map 21x21 (^>v< you, o visited, . unexplored):\n" + "." * 21,
    ]
    if compass is not None:
        sections.append(f"## Compass\ntarget is {compass} (0°), roughly 100 m away")
    if warning is not None:
        sections.append(f"## Warning\n{warning}")
    sections.append("## Instructions\nChoose your next action.")
    return "\n\n".join(sections)


# ---------------------------------------------------------------------------
# CompletionRequest


def test_request_validation():
    with pytest.raises(ValueError):
        CompletionRequest(system="", user="x")
    with pytest.raises(ValueError):
        CompletionRequest(system="s", user="u", temperature=-1.0)
    with pytest.raises(ValueError):
        CompletionRequest(system="s", user="u", max_tokens=0)


# ---------------------------------------------------------------------------
# Scripted


def test_scripted_exact_then_wildcard_then_rules():
    backend = ScriptedBackend(
        script={("decide", 0): "ACTION: search", ("decide", "*"): "ACTION: finish"},
        rules=[("observe", r"bench", "I see the bench.")],
    )
    assert backend.complete(request_for("decide", 0, "u")) == "ACTION: search"
    assert backend.complete(request_for("decide", 3, "u")) == "ACTION: finish"
    assert backend.complete(request_for("observe", 1, "a bench here")) == "I see the bench."


def test_scripted_lookup_miss_is_config_error():
    backend = ScriptedBackend(script={("decide", "*"): "ACTION: finish"})
    with pytest.raises(ConfigError):
        backend.complete(request_for("observe", 0, "u"))


def test_scripted_same_request_same_bytes():
    backend = ScriptedBackend(script={("decide", "*"): "ACTION: move forward\nLENGTH: 2"})
    req = request_for("decide", 5, "whatever")
    assert backend.complete(req) == backend.complete(req)


# ---------------------------------------------------------------------------
# Heuristic policy rules (decide)


def decide(backend, **kwargs):
    return backend.complete(request_for("decide", 1, frame_user(**kwargs)))


def test_rule1_compass_ahead_front_clear():
    backend = HeuristicBackend()
    assert decide(backend, compass="ahead") == "ACTION: move forward\nLENGTH: 10"
    assert decide(backend, compass="ahead", front="wall 9.0 m") == (
        "ACTION: move forward\nLENGTH: 7"
    )


def test_rule1_applies_without_compass():
    backend = HeuristicBackend()
    assert decide(backend) == "ACTION: move forward\nLENGTH: 10"


def test_rule2_collision_turns_toward_clearer_side():
    backend = HeuristicBackend()
    out = decide(
        backend,
        front="wall 1.0 m",
        left="building 20.0 m",
        right="building 3.0 m",
        compass="ahead",
        warning="Warning: wall 1.0 m ahead",
    )
    assert out == "ACTION: turn left\nANGLE: 45"
    out2 = decide(
        backend,
        front="wall 1.0 m",
        left="building 3.0 m",
        right="building 20.0 m",
        compass="ahead",
        warning="Warning: wall 1.0 m ahead",
    )
    assert out2 == "ACTION: turn right\nANGLE: 45"


def test_rule3_band_steering():
    backend = HeuristicBackend()
    assert decide(backend, compass="ahead-left", front="wall 3.0 m") == (
        "ACTION: turn left\nANGLE: 45"
    )
    assert decide(backend, compass="right", front="wall 3.0 m") == (
        "ACTION: turn right\nANGLE: 45"
    )


def test_rule4_goal_caption_in_view_and_close():
    backend = HeuristicBackend()
    view = (
        "It is a bright summer morning in town. You see a subway-entrance "
        'marked "A large \'Subway\' sign" ahead at about 8.0 m.'
    )
    out = decide(backend, compass="behind", front="subway-entrance 8.0 m", view=view)
    assert out == "ACTION: finish"
    # Not close enough ahead: falls through to search.
    out2 = decide(backend, compass="behind", front="subway-entrance 12.0 m", view=view)
    assert out2 == "ACTION: search"


def test_rule5_search_fallback():
    backend = HeuristicBackend()
    assert decide(backend, compass="behind", front="wall 3.0 m") == "ACTION: search"


def test_heuristic_plan_mentions_band_word():
    backend = HeuristicBackend()
    out = backend.complete(request_for("plan", 1, frame_user(compass="ahead-right")))
    assert "ahead-right" in out


def test_heuristic_observe_summarizes_front():
    backend = HeuristicBackend()
    out = backend.complete(request_for("observe", 0, frame_user(front="wall 4.0 m")))
    assert "wall" in out and "4.0" in out


def test_heuristic_missing_sections_is_config_error():
    backend = HeuristicBackend()
    with pytest.raises(ConfigError):
        backend.complete(request_for("decide", 0, "no sections here"))


def test_heuristic_deterministic():
    backend = HeuristicBackend()
    req = request_for("decide", 2, frame_user(compass="ahead"))
    assert backend.complete(req) == backend.complete(req)


# ---------------------------------------------------------------------------
# HTTP backend


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        payload = json.loads(self.rfile.read(length))
        _Handler.last_payload = payload
        body = json.dumps(
            {"choices": [{"message": {"role": "assistant", "content": "ACTION: finish"}}]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def local_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_backend_round_trip(local_server, monkeypatch):
    monkeypatch.setenv("TA_API_KEY", "test-key")
    backend = HttpBackend(endpoint=local_server, model="test-model")
    out = backend.complete(request_for("decide", 0, "user text"))
    assert out == "ACTION: finish"
    payload = _Handler.last_payload
    assert payload["model"] == "test-model"
    assert payload["messages"][0]["role"] == "system"
    assert payload["messages"][1]["content"] == "user text"


def test_http_unreachable_retries_three_times():
    backend = HttpBackend(
        endpoint="http://127.0.0.1:9",  # discard port; nothing listens
        model="m",
        timeout=0.2,
        backoff=(0.0, 0.0, 0.0),
    )
    with pytest.raises(BackendError) as err:
        backend.complete(request_for("decide", 0, "u"))
    assert err.value.attempts == 3


def test_http_error_status_surfaces():
    class ErrHandler(BaseHTTPRequestHandler):
        def do_POST(self):
            self.send_response(500)
            self.send_header("Content-Length", "0")
            self.end_headers()

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), ErrHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        backend = HttpBackend(
            endpoint=f"http://127.0.0.1:{server.server_port}",
            model="m",
            backoff=(0.0, 0.0, 0.0),
        )
        with pytest.raises(BackendError) as err:
            backend.complete(request_for("decide", 0, "u"))
        assert "500" in str(err.value)
    finally:
        server.shutdown()


# ---------------------------------------------------------------------------
# factory


def test_make_backend_kinds():
    assert isinstance(make_backend({"kind": "heuristic"}), HeuristicBackend)
    assert isinstance(
        make_backend({"kind": "scripted", "script": [{"stage": "decide", "text": "ACTION: finish"}]}),
        ScriptedBackend,
    )
    assert isinstance(
        make_backend({"kind": "http", "endpoint": "http://x", "model": "m"}), HttpBackend
    )
    with pytest.raises(ConfigError):
        make_backend({"kind": "quantum"})
    with pytest.raises(ConfigError):
        make_backend({"kind": "heuristic", "mystery": 1})
    with pytest.raises(ConfigError):
        make_backend({})
