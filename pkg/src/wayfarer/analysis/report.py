"""Report bundle: summary docs, term/topic CSVs, path and heat-map SVGs.

All emitters are deterministic: equal inputs produce byte-identical files.
CSV output is RFC-4180 (UTF-8, CRLF rows); SVGs are hand-assembled SVG 1.1
documents with pinned number formatting.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from . import spatial, terms as terms_mod, topics as topics_mod
from .corpus import corpus_from_results
from .sentiment import sentiment_paths

SENTIMENT_COLORS = {
    "positive": "#4878CF",
    "neutral": "#AAAAAA",
    "negative": "#F2B5C4",
}
FINISH_COLOR = "red"
PATH_STROKE = "#555555"
SEARCH_RING = "#333333"

# Shown next to computed stream statistics for context only; these came
# from an interactive hosted-LLM deployment of this kind of platform and
# are never asserted by any test.
REFERENCE_CONTEXT = {
    "completion_rate": 0.76,
    "word_counts": {"plan": 91340, "memory": 156663, "observation": 219742},
}


def _fmt(value):
    return f"{value:.2f}"


def render_path_svg(path, sentiments=None, pad=5.0):
    """Path polyline with decision dots; red dots mark finish steps.

    ``sentiments`` (from analysis.sentiment.annotate_steps) colors the
    decision dots by class; without it dots render neutral gray.
    """
    xs = [p[0] for p in path.polyline] + [p[0] for p in path.decision_points]
    ys = [p[1] for p in path.polyline] + [p[1] for p in path.decision_points]
    if not xs:
        xs, ys = [0.0], [0.0]
    minx, maxx = min(xs) - pad, max(xs) + pad
    miny, maxy = min(ys) - pad, max(ys) + pad
    width = maxx - minx
    height = maxy - miny

    def sx(x):
        return _fmt(x - minx)

    def sy(y):
        # Flip so north is up in screen coordinates.
        return _fmt(maxy - y)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<title>{path.sim_id} ({path.outcome})</title>',
    ]
    if len(path.polyline) >= 2:
        points = " ".join(f"{sx(x)},{sy(y)}" for x, y in path.polyline)
        lines.append(
            f'<polyline points="{points}" fill="none" '
            f'stroke="{PATH_STROKE}" stroke-width="0.4"/>'
        )
    for i, (x, y) in enumerate(path.decision_points):
        if path.finish_flags[i]:
            continue
        color = SENTIMENT_COLORS["neutral"]
        if sentiments is not None:
            color = SENTIMENT_COLORS[sentiments[i]["label"]]
        ring = f' stroke="{SEARCH_RING}" stroke-width="0.25"' if path.search_flags[i] else ""
        lines.append(
            f'<circle cx="{sx(x)}" cy="{sy(y)}" r="0.8" fill="{color}"{ring} '
            f'class="decision"/>'
        )
    for i, (x, y) in enumerate(path.decision_points):
        if path.finish_flags[i]:
            lines.append(
                f'<circle cx="{sx(x)}" cy="{sy(y)}" r="1.2" fill="{FINISH_COLOR}" '
                f'class="finish"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_heatmap_svg(grid, label):
    """Decision-point heat map; every cell carries its count as data-count."""
    total = grid.total()
    counts = grid.success + grid.failure
    peak = int(counts.max()) if counts.size else 0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {grid.width} {grid.height}" data-total="{total}">',
        f"<title>decision points: {label}</title>",
    ]
    for row in range(grid.height):
        for col in range(grid.width):
            count = int(counts[row, col])
            if count == 0:
                continue
            # Darker cells carry more decisions; row 0 is the south edge.
            shade = 255 - int(round(200 * (count / peak))) if peak else 255
            color = f"#{shade:02x}{shade:02x}ff"
            y = grid.height - 1 - row
            lines.append(
                f'<rect x="{col}" y="{y}" width="1" height="1" '
                f'fill="{color}" data-count="{count}"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_summary(results, summary, out_dir):
    out_dir = Path(out_dir)
    doc = {
        "total": summary.total,
        "completed": summary.completed,
        "completion_rate": summary.completion_rate,
        "total_steps": summary.total_steps,
        "per_label": summary.per_label,
        "reference_context": REFERENCE_CONTEXT,
    }
    if results:
        corp = corpus_from_results(results)
        doc["word_counts"] = terms_mod.word_counts(corp)
    (out_dir / "summary.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_csv(
        out_dir / "summary.csv",
        ["label", "season", "location", "time", "persona", "status", "steps", "completion"],
        summary.rows(results),
    )


def write_term_report(results, out_dir, n=200):
    corp = corpus_from_results(results, streams=("plan",))
    if not corp.documents:
        return
    rows = []
    for label, ranked in sorted(terms_mod.top_terms(corp, n).items()):
        for rank, (term, score) in enumerate(ranked, start=1):
            rows.append([label, rank, term, f"{score:.6f}"])
    _write_csv(Path(out_dir) / "top_terms.csv", ["label", "rank", "term", "score"], rows)


def write_topic_report(model, labels, duplicates, out_dir):
    rows = []
    for topic in range(model.n_topics):
        top = topics_mod.top_topic_terms(model, topic, n=10)
        rows.append([topic, labels[topic], " ".join(top)])
    _write_csv(Path(out_dir) / "topics.csv", ["topic", "label", "top_terms"], rows)
    if duplicates:
        note = Path(out_dir) / "topics_duplicates.txt"
        note.write_text(
            "duplicate topic labels: " + ", ".join(duplicates) + "\n", encoding="utf-8"
        )


def write_report(results, summary, out_dir, sim_ids=None, topics_seed=0):
    """Full report bundle over a set of finished runs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary(results, summary, out_dir)
    if not results:
        return
    write_term_report(results, out_dir)

    paths = spatial.extract_paths(results, sim_ids=sim_ids)
    annotated = sentiment_paths(results)
    path_dir = out_dir / "paths"
    path_dir.mkdir(exist_ok=True)
    for path, sentiments in zip(paths, annotated):
        svg = render_path_svg(path, sentiments)
        (path_dir / f"{path.sim_id}.svg").write_text(svg, encoding="utf-8")

    heat_dir = out_dir / "heatmaps"
    heat_dir.mkdir(exist_ok=True)
    by_scene_label = {}
    for path in paths:
        by_scene_label.setdefault(path.label, []).append(path)
    for label, group in sorted(by_scene_label.items()):
        grid = spatial.aggregate(group)
        svg = render_heatmap_svg(grid, label)
        (heat_dir / f"{label}.svg").write_text(svg, encoding="utf-8")

    corp = corpus_from_results(results, streams=("observation", "plan"))
    try:
        model = topics_mod.lda_fit(corp, seed=topics_seed)
        labels, duplicates = topics_mod.assign_topic_labels(model)
        write_topic_report(model, labels, duplicates, out_dir)
    except ValueError:
        pass  # corpus smaller than the topic count; skip the topic table
