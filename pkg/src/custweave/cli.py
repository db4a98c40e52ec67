"""Operator command line: validate, inspect, replay, generate, bench, serve.

Exit codes: 0 success, 1 domain failure (invalid model, invalid op under
--strict, failed bench), 2 input error (unreadable file, bad JSON, bad
flags).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as benchmod
from .engine import replay as run_replay
from .errors import (
    InfeasibleParams,
    ModelInvalid,
    ParseError,
    SchemaError,
    UnknownConcern,
    UnknownElement,
)
from .metagraph import build_adjacency, closure
from .model import app_metagraph, concern_guidance, concern_metagraph
from .model_io import (
    GeneratorParams,
    generate_model,
    load_model,
    matrix_records,
    save_customization,
    save_model,
)
from .service import DEFAULT_LISTEN, DEFAULT_MAX_SESSIONS, serve


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        raise SystemExit(2)


def _load_model_file(path: str):
    data = _read_file(path)
    try:
        return load_model(data)
    except (ParseError, SchemaError) as exc:
        click.echo(str(exc), err=True)
        raise SystemExit(2)
    except ModelInvalid as exc:
        for violation in exc.report.violations:
            click.echo(str(violation), err=True)
        raise SystemExit(1)


@click.group()
def main():
    """Customization modelling workbench for multi-tenant applications."""


@main.command()
@click.argument("model_file")
def check(model_file):
    """Validate a model document; exit 0 only if it is well formed."""
    model = _load_model_file(model_file)
    concerns = sum(len(d.concerns) for d in model.dimensions)
    click.echo(f"ok: {len(model.components)} components, "
               f"{len(model.dimensions)} dimensions, {concerns} concerns")


def _matrix_line(record: dict) -> str:
    ci = ",".join(record["coinput"])
    co = ",".join(record["cooutput"])
    path = ",".join(record["path"])
    return (f"{record['source']} -> {record['target']}  "
            f"ci={{{ci}}} co={{{co}}} path=[{path}]")


@main.command()
@click.argument("model_file")
@click.option("--concern", "concern_id", default=None,
              help="Restrict to one concern's metagraph (default: whole app).")
@click.option("--closure", "want_closure", is_flag=True,
              help="All requirement paths instead of direct requirements.")
@click.option("--target", default=None,
              help="Only paths into this component, shortest first.")
def matrix(model_file, concern_id, want_closure, target):
    """Print adjacency or closure cells of a model's requirement metagraph."""
    model = _load_model_file(model_file)
    try:
        if concern_id is not None and target is not None:
            entries = concern_guidance(model, concern_id, target,
                                       None if want_closure else 1)
            for g in entries:
                click.echo(_matrix_line(g.to_dict()))
            return
        s = concern_metagraph(model, concern_id) if concern_id else app_metagraph(model)
        if target is not None and target not in s.elements:
            raise UnknownElement(target)
    except (UnknownConcern, UnknownElement) as exc:
        click.echo(str(exc), err=True)
        raise SystemExit(1)
    matrix_value = closure(s) if want_closure else build_adjacency(s)
    records = matrix_records(matrix_value)
    if target is not None:
        records = [r for r in records if r["target"] == target]
        records.sort(key=lambda r: (r["length"], r["source"], r["path"]))
    for record in records:
        click.echo(_matrix_line(record))


@main.command(name="replay")
@click.argument("model_file")
@click.argument("ops_file")
@click.option("--strict", is_flag=True, help="Exit 1 at the first invalid operation.")
@click.option("--out", "out_file", default=None,
              help="Write the final customization document here.")
@click.option("--tenant", default="default", help="Tenant id recorded in the output.")
def replay_cmd(model_file, ops_file, strict, out_file, tenant):
    """Apply an operation log to an empty customization, printing decisions."""
    model = _load_model_file(model_file)
    try:
        ops = json.loads(_read_file(ops_file))
    except json.JSONDecodeError as exc:
        click.echo(f"ops file: line {exc.lineno}: {exc.msg}", err=True)
        raise SystemExit(2)
    if not isinstance(ops, list):
        click.echo("ops file must hold a JSON array of operations", err=True)
        raise SystemExit(2)

    result = run_replay(model, ops, tenant)
    for index, (op, decision) in enumerate(zip(ops, result.decisions)):
        kind = op.get("op", "?") if isinstance(op, dict) else "?"
        component = op.get("component", "?") if isinstance(op, dict) else "?"
        where = f" @{op['concern']}" if isinstance(op, dict) and op.get("concern") else ""
        detail = ""
        if decision.satisfied_edge:
            detail += f" via {decision.satisfied_edge}"
        if decision.recorded_supports:
            detail += f" supports={{{','.join(sorted(decision.recorded_supports))}}}"
        if decision.removed_edges:
            detail += f" removed={{{','.join(sorted(decision.removed_edges))}}}"
        click.echo(f"[{index}] {kind} {component}{where} -> {decision.verdict} "
                   f"({decision.reason}){detail} v{decision.state_version}")
        if strict and not decision.valid:
            raise SystemExit(1)
    if out_file:
        Path(out_file).write_bytes(save_customization(result.final))


@main.command()
@click.option("--components", required=True, type=int)
@click.option("--points", type=int, default=None,
              help="Customization points (default: one per 25 components).")
@click.option("--dimensions", type=int, default=3, show_default=True)
@click.option("--concerns-per-dimension", type=int, default=4, show_default=True)
@click.option("--edge-density", type=float, default=0.3, show_default=True)
@click.option("--and-ratio", type=float, default=0.5, show_default=True)
@click.option("--max-invertex", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_file", default=None, help="Output file (default: stdout).")
def generate(components, points, dimensions, concerns_per_dimension, edge_density,
             and_ratio, max_invertex, seed, out_file):
    """Generate a random well-formed model for benchmarks and demos."""
    params = GeneratorParams(
        components=components,
        customization_points=points if points is not None else max(1, components // 25),
        dimensions=dimensions,
        concerns_per_dimension=concerns_per_dimension,
        edge_density=edge_density,
        and_ratio=and_ratio,
        max_invertex=max_invertex,
        seed=seed,
    )
    try:
        model = generate_model(params)
    except InfeasibleParams as exc:
        click.echo(str(exc), err=True)
        raise SystemExit(1)
    data = save_model(model)
    edges = len(model.all_edges())
    concerns = sum(len(d.concerns) for d in model.dimensions)
    if out_file:
        Path(out_file).write_bytes(data)
        click.echo(f"wrote {out_file}: {len(model.components)} components, "
                   f"{concerns} concerns, {edges} edges")
    else:
        sys.stdout.buffer.write(data)
        click.echo(f"{len(model.components)} components, {concerns} concerns, "
                   f"{edges} edges", err=True)


def _int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        click.echo(f"{flag} expects a comma-separated list of integers", err=True)
        raise SystemExit(2)
    if not values:
        click.echo(f"{flag} must not be empty", err=True)
        raise SystemExit(2)
    return values


@main.command(name="bench")
@click.option("--sizes", default=None,
              help="Comma-separated model sizes for the in-process latency run.")
@click.option("--concurrency", default=None,
              help="Comma-separated client counts for the service latency run.")
@click.option("--ops", default=1000, show_default=True, type=int,
              help="Operations per size / per concurrency level.")
@click.option("--size", default=500, show_default=True, type=int,
              help="Model size used by the concurrency run.")
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--csv", "csv_file", default=None,
              help="Write one row per measured operation; figures land beside it.")
def bench_cmd(sizes, concurrency, ops, size, seed, csv_file):
    """Measure operation latency against model size and concurrent clients."""
    if sizes is None and concurrency is None:
        click.echo("nothing to do: pass --sizes and/or --concurrency", err=True)
        raise SystemExit(2)

    report = benchmod.BenchReport()
    size_summaries = []
    concurrency_summaries = []
    if sizes is not None:
        size_report = benchmod.bench_sizes(_int_list(sizes, "--sizes"), ops, seed)
        report.rows.extend(size_report.rows)
        report.failures.extend(size_report.failures)
        report.closure_seconds.update(size_report.closure_seconds)
        size_summaries = size_report.summaries()
        for summary in size_summaries:
            click.echo(summary.line())
        for model_size, seconds in sorted(report.closure_seconds.items()):
            click.echo(f"closure precompute size={model_size}: {seconds * 1000:.1f}ms")
    if concurrency is not None:
        levels = _int_list(concurrency, "--concurrency")
        concurrency_report = benchmod.bench_concurrency(levels, ops, seed, size)
        report.rows.extend(concurrency_report.rows)
        report.failures.extend(concurrency_report.failures)
        concurrency_summaries = concurrency_report.summaries()
        for summary in concurrency_summaries:
            click.echo(summary.line())

    if csv_file:
        report.write_csv(csv_file)
        click.echo(f"wrote {csv_file} ({len(report.rows)} rows)")
        from . import plots

        stem = str(Path(csv_file).with_suffix(""))
        if size_summaries:
            plots.render_size_figure(size_summaries, f"{stem}_sizes.png")
            click.echo(f"wrote {stem}_sizes.png")
        if concurrency_summaries:
            plots.render_concurrency_figure(concurrency_summaries,
                                            f"{stem}_concurrency.png")
            click.echo(f"wrote {stem}_concurrency.png")

    if report.failures:
        for failure in report.failures[:20]:
            click.echo(f"FAILED: {failure}", err=True)
        click.echo(f"{len(report.failures)} failed decisions", err=True)
        raise SystemExit(1)


@main.command(name="serve")
@click.option("--listen", default=DEFAULT_LISTEN, show_default=True)
@click.option("--snapshot-dir", default=None,
              help="Append per-session snapshots of accepted operations here.")
@click.option("--max-sessions", default=DEFAULT_MAX_SESSIONS, show_default=True, type=int)
def serve_cmd(listen, snapshot_dir, max_sessions):
    """Run the HTTP session service in the foreground."""
    raise SystemExit(serve(listen, snapshot_dir, max_sessions))


if __name__ == "__main__":
    main()
