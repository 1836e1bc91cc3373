"""Command-line entry point for scenes, runs, matrices, and analyses.

Exit codes are stable: 0 success, 1 domain validation failure, 2 usage or
configuration error, 3 simulation ran but did not complete its task.
"""

from __future__ import annotations

import glob as glob_mod
import json
import sys
from pathlib import Path

import click

from . import config as config_mod
from . import sim as sim_mod
from .analysis import report as report_mod
from .analysis import corpus as corpus_mod
from .analysis import spatial as spatial_mod
from .analysis import topics as topics_mod
from .analysis.sentiment import sentiment_paths
from .errors import ConfigError, SceneSchemaError, SceneValidationError, TraceError, WayfarerError
from .scene import load_scene

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3


@click.group()
def main():
    """Pedestrian-agent wayfinding simulator."""


@main.group()
def scene():
    """Scene document utilities."""


@scene.command("validate")
@click.argument("path")
def scene_validate(path):
    """Validate a scene document; exit 0 when it loads cleanly."""
    try:
        scn = load_scene(path)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except (SceneSchemaError, SceneValidationError) as exc:
        click.echo(f"invalid scene: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(
        f"ok: {scn.scene_id} ({len(scn.objects)} objects, "
        f"{len(scn.walkable)} walkable polygons, {len(scn.goals)} goals)"
    )
    sys.exit(EXIT_OK)


@main.command("run")
@click.option("--config", "config_path", required=True, help="run config JSON")
@click.option("--seed", type=int, default=None, help="override the rng seed")
@click.option("--backend", "backend_kind", default=None,
              type=click.Choice(["scripted", "heuristic", "http"]), help="override the backend kind")
@click.option("--out", "out_dir", default=".", help="directory for the trace file")
def run_cmd(config_path, seed, backend_kind, out_dir):
    """Run one simulation and write its trace."""
    try:
        spec = config_mod.load_run_config(config_path, seed=seed, backend_kind=backend_kind)
    except (ConfigError, FileNotFoundError, SceneSchemaError, SceneValidationError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    result = sim_mod.run(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / f"{spec.label}-{spec.rng_seed}.talog"
    sim_mod.write_trace(result, trace_path, spec=spec)
    click.echo(f"status={result.status} steps={len(result.steps)}")
    click.echo(f"trace={trace_path}")
    sys.exit(EXIT_OK if result.completed else EXIT_INCOMPLETE)


@main.command("batch")
@click.option("--matrix", "matrix_path", required=True, help="matrix config JSON")
@click.option("--parallel", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="override the base seed")
@click.option("--backend", "backend_kind", default=None,
              type=click.Choice(["scripted", "heuristic", "http"]))
@click.option("--out", "out_dir", default="batch_out", show_default=True)
def batch_cmd(matrix_path, parallel, seed, backend_kind, out_dir):
    """Run a scenario matrix; exit 0 when every run produced a result."""
    if parallel < 1:
        click.echo("error: --parallel must be >= 1", err=True)
        sys.exit(EXIT_USAGE)
    try:
        specs = config_mod.load_matrix_config(matrix_path, seed=seed, backend_kind=backend_kind)
    except (ConfigError, FileNotFoundError, SceneSchemaError, SceneValidationError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    results, summary = sim_mod.run_matrix(specs, parallelism=parallel)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, (spec, result) in enumerate(zip(specs, results)):
        sim_mod.write_trace(result, out / f"{spec.label}-{i:03d}.talog", spec=spec)
    report_mod.write_summary(results, summary, out)
    click.echo(
        f"ran {summary.total} simulations: {summary.completed} completed "
        f"(rate {summary.completion_rate:.2f}), {summary.total_steps} steps total"
    )
    click.echo(f"summary={out / 'summary.csv'}")
    sys.exit(EXIT_OK)


def _load_traces(traces_glob):
    paths = sorted(glob_mod.glob(traces_glob))
    if not paths:
        raise ConfigError(f"no traces match {traces_glob!r}")
    results = [sim_mod.read_trace(p) for p in paths]
    sim_ids = [Path(p).stem for p in paths]
    return paths, results, sim_ids


@main.command("analyze")
@click.argument("kind", type=click.Choice(["paths", "terms", "topics", "sentiment"]))
@click.option("--traces", "traces_glob", required=True, help="glob of .talog files")
@click.option("--out", "out_dir", required=True)
@click.option("--group-by", "group_by", default="scenario", show_default=True,
              type=click.Choice(["scenario", "stream"]))
@click.option("--seed", type=int, default=0, show_default=True, help="LDA chain seed")
@click.option("--top", "top_n", type=int, default=200, show_default=True)
def analyze_cmd(kind, traces_glob, out_dir, group_by, seed, top_n):
    """Run one analysis over trace files and write its artifacts."""
    try:
        paths, results, sim_ids = _load_traces(traces_glob)
    except (ConfigError, TraceError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE if isinstance(exc, ConfigError) else EXIT_VALIDATION)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if kind == "paths":
        sim_paths = spatial_mod.extract_paths(results, sim_ids=sim_ids)
        for sp in sim_paths:
            svg = report_mod.render_path_svg(sp)
            (out / f"{sp.sim_id}.svg").write_text(svg, encoding="utf-8")
        by_label = {}
        for sp in sim_paths:
            by_label.setdefault(sp.label, []).append(sp)
        for label, group in sorted(by_label.items()):
            grid = spatial_mod.aggregate(group)
            (out / f"heatmap-{label}.svg").write_text(
                report_mod.render_heatmap_svg(grid, label), encoding="utf-8"
            )
        click.echo(f"wrote {len(sim_paths)} path SVGs and {len(by_label)} heat maps to {out}")
        sys.exit(EXIT_OK)

    if kind == "terms":
        corp = corpus_mod.corpus_from_results(results, sim_ids=sim_ids, streams=("plan",))
        if not corp.documents:
            click.echo("error: traces contain no steps", err=True)
            sys.exit(EXIT_VALIDATION)
        report_mod.write_term_report(results, out, n=top_n)
        click.echo(f"wrote top-term table to {out / 'top_terms.csv'}")
        sys.exit(EXIT_OK)

    if kind == "topics":
        corp = corpus_mod.corpus_from_results(
            results, sim_ids=sim_ids, streams=("observation", "plan")
        )
        try:
            model = topics_mod.lda_fit(corp, seed=seed)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        labels, duplicates = topics_mod.assign_topic_labels(model)
        report_mod.write_topic_report(model, labels, duplicates, out)
        click.echo(f"wrote topic table to {out / 'topics.csv'}")
        sys.exit(EXIT_OK)

    # sentiment
    sim_paths = spatial_mod.extract_paths(results, sim_ids=sim_ids)
    annotated = sentiment_paths(results)
    for sp, ann in zip(sim_paths, annotated):
        svg = report_mod.render_path_svg(sp, ann)
        (out / f"{sp.sim_id}-sentiment.svg").write_text(svg, encoding="utf-8")
    click.echo(f"wrote {len(sim_paths)} sentiment path SVGs to {out}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
