"""Term-frequency analysis: TF-IDF scores, top terms, stream word counts."""

from __future__ import annotations

import math
from collections import Counter

from .corpus import tokenize


def tfidf(corp):
    """Per-document term scores.

    tf is the raw count in the document; idf = ln((1 + D) / (1 + df)) + 1;
    score = tf * idf.  Returns a list (one dict per document) aligned with
    ``corp.documents``.
    """
    if not corp.documents:
        raise ValueError("corpus is empty")
    doc_tokens = [tokenize(doc.text) for doc in corp.documents]
    n_docs = len(doc_tokens)
    df = Counter()
    for tokens in doc_tokens:
        df.update(set(tokens))
    idf = {term: math.log((1 + n_docs) / (1 + count)) + 1.0 for term, count in df.items()}
    scores = []
    for tokens in doc_tokens:
        tf = Counter(tokens)
        scores.append({term: count * idf[term] for term, count in tf.items()})
    return scores


def group_scores(corp, group_by="scenario"):
    """Summed TF-IDF scores per group (scenario label or stream)."""
    if group_by == "scenario":
        keys = [doc.label for doc in corp.documents]
    elif group_by == "stream":
        keys = [doc.stream for doc in corp.documents]
    else:
        raise ValueError(f"unknown group_by '{group_by}'")
    per_doc = tfidf(corp)
    grouped = {}
    for key, scores in zip(keys, per_doc):
        bucket = grouped.setdefault(key, {})
        for term, score in scores.items():
            bucket[term] = bucket.get(term, 0.0) + score
    return grouped


def top_terms(corp, n, group_by="scenario"):
    """The n highest-scoring terms per group; ties break lexicographically."""
    grouped = group_scores(corp, group_by=group_by)
    out = {}
    for key, bucket in grouped.items():
        ranked = sorted(bucket.items(), key=lambda item: (-item[1], item[0]))
        out[key] = ranked[:n]
    return out


def word_counts(corp):
    """Token totals per cognitive stream.

    Reported for context next to reference figures in the summary; the
    actual values depend entirely on the completion provider.
    """
    totals = {"observation": 0, "plan": 0, "memory": 0}
    for doc in corp.documents:
        totals[doc.stream] = totals.get(doc.stream, 0) + len(tokenize(doc.text))
    return totals
