"""Lexicon-and-rules valence scoring of cognitive-stream text.

The scoring rules follow the widely used VADER analyzer's published
constants: a negator within the three preceding tokens multiplies a token's
valence by -0.74, a booster within the two preceding tokens shifts it by
0.293 toward (or away from, for dampeners) its sign, and the summed valence
s normalizes to compound = s / sqrt(s^2 + 15).  The valence lexicon is a
repo-owned data file; see data/nlp/LEXICON_NOTES.md.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources

N_SCALAR = -0.74
B_SHIFT = 0.293
NORMALIZATION_ALPHA = 15.0
POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05
NEGATOR_WINDOW = 3
BOOSTER_WINDOW = 2

_WORD_SPLIT = re.compile(r"[^0-9a-z]+")

NEGATORS = frozenset(
    {
        "not", "no", "never", "none", "neither", "nor", "nothing", "nowhere",
        "cannot", "without", "hardly", "scarcely", "isn", "aren", "wasn",
        "weren", "hasn", "haven", "hadn", "doesn", "don", "didn", "shouldn",
        "wouldn", "couldn", "mustn", "needn", "ain",
    }
)

# Degree modifiers: +0.293 intensifies, -0.293 dampens.
BOOSTERS = {
    "absolutely": B_SHIFT,
    "completely": B_SHIFT,
    "considerably": B_SHIFT,
    "decidedly": B_SHIFT,
    "deeply": B_SHIFT,
    "especially": B_SHIFT,
    "extremely": B_SHIFT,
    "fully": B_SHIFT,
    "greatly": B_SHIFT,
    "highly": B_SHIFT,
    "hugely": B_SHIFT,
    "incredibly": B_SHIFT,
    "intensely": B_SHIFT,
    "more": B_SHIFT,
    "most": B_SHIFT,
    "particularly": B_SHIFT,
    "quite": B_SHIFT,
    "really": B_SHIFT,
    "remarkably": B_SHIFT,
    "so": B_SHIFT,
    "substantially": B_SHIFT,
    "thoroughly": B_SHIFT,
    "totally": B_SHIFT,
    "truly": B_SHIFT,
    "unusually": B_SHIFT,
    "utterly": B_SHIFT,
    "very": B_SHIFT,
    "almost": -B_SHIFT,
    "barely": -B_SHIFT,
    "kind": -B_SHIFT,
    "kinda": -B_SHIFT,
    "less": -B_SHIFT,
    "little": -B_SHIFT,
    "marginally": -B_SHIFT,
    "occasionally": -B_SHIFT,
    "partly": -B_SHIFT,
    "slightly": -B_SHIFT,
    "somewhat": -B_SHIFT,
    "sort": -B_SHIFT,
}


@dataclass(frozen=True)
class SentimentLabel:
    compound: float
    label: str


def load_lexicon():
    text = (resources.files("wayfarer.data.nlp") / "sentiment_lexicon.tsv").read_text("utf-8")
    lexicon = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token, valence = line.split("\t")
        lexicon[token] = float(valence)
    return lexicon


LEXICON = load_lexicon()


def sentiment_tokens(text):
    """Sentiment uses surface tokens: lowercase, split on non-alphanumeric,
    no stopwording or stemming (negators are function words)."""
    return [t for t in _WORD_SPLIT.split(text.lower()) if t]


def classify(compound):
    if compound >= POSITIVE_THRESHOLD:
        return "positive"
    if compound <= NEGATIVE_THRESHOLD:
        return "negative"
    return "neutral"


def sentiment(text, lexicon=None):
    """Score a text; returns the compound value in (-1, 1) and its class."""
    lex = lexicon if lexicon is not None else LEXICON
    tokens = sentiment_tokens(text)
    total = 0.0
    for i, token in enumerate(tokens):
        valence = lex.get(token)
        if valence is None or valence == 0.0:
            continue
        sign = 1.0 if valence > 0 else -1.0
        for j in range(max(0, i - BOOSTER_WINDOW), i):
            shift = BOOSTERS.get(tokens[j])
            if shift is not None:
                valence += sign * shift
        for j in range(max(0, i - NEGATOR_WINDOW), i):
            if tokens[j] in NEGATORS:
                valence *= N_SCALAR
                break
        total += valence
    compound = total / math.sqrt(total * total + NORMALIZATION_ALPHA)
    return SentimentLabel(compound=compound, label=classify(compound))


def annotate_steps(result):
    """Sentiment per step over observation + plan, with search/finish flags."""
    out = []
    for step in result.steps:
        scored = sentiment(step.outputs.observation + " " + step.outputs.plan)
        out.append(
            {
                "step_index": step.index,
                "x": step.pose_after.x,
                "y": step.pose_after.y,
                "compound": scored.compound,
                "label": scored.label,
                "is_search": step.outputs.action.kind == "search",
                "is_finish": step.outputs.action.kind == "finish",
                "phase": step.phase,
            }
        )
    return out


def sentiment_paths(results):
    """Annotated path per simulation; finish steps mark subtask boundaries."""
    return [annotate_steps(result) for result in results]
