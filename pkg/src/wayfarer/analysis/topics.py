"""Topic modeling of the cognitive streams via collapsed Gibbs LDA.

The sampler is deterministic given (corpus order, seed): topic init and
every Gibbs draw consume the documented 64-bit LCG, and the sweep kernel
runs single-threaded.  Independent fits parallelize fine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .. import kernels
from ..rng import Lcg64, MASK64
from .corpus import tokenize

DEFAULT_TOPICS = 5
DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000

FALLBACK_CATEGORY = "urban environment"
TOP_TERMS_FOR_LABELING = 20


@dataclass(frozen=True)
class TopicModel:
    n_topics: int
    vocab: tuple
    phi: np.ndarray    # (K, V) topic-word distributions, rows sum to 1
    theta: np.ndarray  # (D, K) document-topic distributions, rows sum to 1
    labels: tuple | None = None


def lda_fit(corp, n_topics=DEFAULT_TOPICS, alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA,
            iterations=DEFAULT_ITERATIONS, seed=0):
    """Fit LDA by collapsed Gibbs sampling.

    Raises ValueError for degenerate corpora (fewer documents or vocabulary
    terms than topics).
    """
    doc_tokens = [tokenize(doc.text) for doc in corp.documents]
    vocab = sorted({t for tokens in doc_tokens for t in tokens})
    if len(doc_tokens) < n_topics:
        raise ValueError(f"corpus has {len(doc_tokens)} documents, need >= {n_topics}")
    if len(vocab) < n_topics:
        raise ValueError(f"corpus vocabulary has {len(vocab)} terms, need >= {n_topics}")
    term_ids = {t: i for i, t in enumerate(vocab)}
    w, d = [], []
    for di, tokens in enumerate(doc_tokens):
        for t in tokens:
            w.append(term_ids[t])
            d.append(di)
    w = np.asarray(w, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    n_docs = len(doc_tokens)
    n_terms = len(vocab)

    rng = Lcg64(seed)
    z = np.asarray([rng.index(n_topics) for _ in range(w.shape[0])], dtype=np.int64)
    n_kv = np.zeros((n_topics, n_terms), dtype=np.int64)
    n_k = np.zeros(n_topics, dtype=np.int64)
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)
    n_d = np.zeros(n_docs, dtype=np.int64)
    for i in range(w.shape[0]):
        n_kv[z[i], w[i]] += 1
        n_k[z[i]] += 1
        n_dk[d[i], z[i]] += 1
        n_d[d[i]] += 1

    state = np.array([rng.state & MASK64], dtype=np.uint64)
    kernels.gibbs_sweeps(w, d, z, n_kv, n_k, n_dk, alpha, beta, iterations, state)

    phi = (n_kv + beta) / (n_k + n_terms * beta)[:, None]
    theta = (n_dk + alpha) / (n_d + n_topics * alpha)[:, None]
    return TopicModel(n_topics=n_topics, vocab=tuple(vocab), phi=phi, theta=theta)


def top_topic_terms(model, topic, n=TOP_TERMS_FOR_LABELING):
    """Highest-probability terms of one topic; ties break lexicographically."""
    order = sorted(
        range(len(model.vocab)),
        key=lambda v: (-model.phi[topic, v], model.vocab[v]),
    )
    return [model.vocab[v] for v in order[:n]]


def load_seed_terms():
    """The five fixed category seed-term lists, tokenizer-normalized."""
    raw = json.loads(
        (resources.files("wayfarer.data.nlp") / "topic_seed_terms.json").read_text("utf-8")
    )
    out = []
    for entry in raw["categories"]:
        terms = set()
        for term in entry["terms"]:
            terms.update(tokenize(term))
        out.append((entry["name"], frozenset(terms)))
    return out


def assign_topic_labels(model, seed_terms=None):
    """Label each topic by best seed-list overlap of its top-20 terms.

    Ties break by category list order; zero overlap falls back to the
    "urban environment" category.  Duplicate labels are allowed; callers
    get the duplicates so reports can flag them.
    Returns (labels, duplicates).
    """
    categories = seed_terms if seed_terms is not None else load_seed_terms()
    labels = []
    for topic in range(model.n_topics):
        top = set(top_topic_terms(model, topic))
        best_name = FALLBACK_CATEGORY
        best_overlap = 0
        for name, terms in categories:
            overlap = len(top & terms)
            if overlap > best_overlap:
                best_name = name
                best_overlap = overlap
        labels.append(best_name)
    seen, duplicates = set(), []
    for name in labels:
        if name in seen and name not in duplicates:
            duplicates.append(name)
        seen.add(name)
    return tuple(labels), tuple(duplicates)
