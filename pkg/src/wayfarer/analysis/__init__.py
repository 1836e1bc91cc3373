"""Trace analyses: spatial paths, term frequency, topics, sentiment, reports."""

from .corpus import Corpus, Document, corpus_from_results, corpus_from_traces, tokenize
from .sentiment import SentimentLabel, sentiment, sentiment_paths
from .spatial import DecisionPointGrid, aggregate, extract_paths, extract_paths_from_traces, grids_by_label
from .terms import group_scores, tfidf, top_terms, word_counts
from .topics import TopicModel, assign_topic_labels, lda_fit, top_topic_terms
from .report import render_heatmap_svg, render_path_svg, write_report

__all__ = [
    "Corpus",
    "Document",
    "corpus_from_results",
    "corpus_from_traces",
    "tokenize",
    "SentimentLabel",
    "sentiment",
    "sentiment_paths",
    "DecisionPointGrid",
    "aggregate",
    "extract_paths",
    "extract_paths_from_traces",
    "grids_by_label",
    "group_scores",
    "tfidf",
    "top_terms",
    "word_counts",
    "TopicModel",
    "assign_topic_labels",
    "lda_fit",
    "top_topic_terms",
    "render_heatmap_svg",
    "render_path_svg",
    "write_report",
]
