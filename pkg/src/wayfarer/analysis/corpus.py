"""Cognitive-stream corpus extraction and the shared tokenizer.

Documents come one per step per stream (observation, plan, memory); the
memory document for a step is the summary line that step appended, so every
document stays traceable to one trace line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .. import agent as agent_mod
from .. import sim as sim_mod

STREAMS = ("observation", "plan", "memory")

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

# Suffixes stripped by the light stemmer, in precedence order; at most one
# suffix is removed and only when the remaining stem keeps >= 3 characters.
_SUFFIXES = ("ing", "ed", "s")


def load_stopwords():
    text = (resources.files("wayfarer.data.nlp") / "stopwords.txt").read_text("utf-8")
    words = [w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#")]
    return frozenset(words)


STOPWORDS = load_stopwords()


def stem(token):
    for suffix in _SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            if suffix == "s" and token.endswith("ss"):
                continue
            return token[: -len(suffix)]
    return token


def tokenize(text):
    """Lowercase, split on non-alphanumeric, drop short tokens and
    stopwords, then apply the light stemmer."""
    tokens = []
    for raw in _TOKEN_SPLIT.split(text.lower()):
        if len(raw) < 2 or raw in STOPWORDS:
            continue
        tokens.append(stem(raw))
    return tokens


@dataclass(frozen=True)
class Document:
    text: str
    stream: str
    label: str
    sim_id: str
    step_index: int


@dataclass(frozen=True)
class Corpus:
    documents: tuple

    def __len__(self):
        return len(self.documents)

    def labels(self):
        seen = []
        for doc in self.documents:
            if doc.label not in seen:
                seen.append(doc.label)
        return seen


def corpus_from_results(results, sim_ids=None, streams=STREAMS):
    """Build a corpus from in-memory simulation results."""
    docs = []
    for i, result in enumerate(results):
        sim_id = sim_ids[i] if sim_ids else f"{result.label}-{i:03d}"
        for step in result.steps:
            per_stream = {
                "observation": step.outputs.observation,
                "plan": step.outputs.plan,
                "memory": agent_mod.memory_line(
                    step.index, step.outputs.action, step.outputs.observation
                ),
            }
            for stream in streams:
                docs.append(
                    Document(
                        text=per_stream[stream],
                        stream=stream,
                        label=result.label,
                        sim_id=sim_id,
                        step_index=step.index,
                    )
                )
    return Corpus(tuple(docs))


def corpus_from_traces(paths, streams=STREAMS):
    """Build a corpus by reading .talog files."""
    paths = list(paths)
    results = [sim_mod.read_trace(p) for p in paths]
    from pathlib import Path

    sim_ids = [Path(p).stem for p in paths]
    return corpus_from_results(results, sim_ids=sim_ids, streams=streams)
