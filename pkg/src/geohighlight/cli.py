"""Offline tooling: trace replay, session statistics, benchmarks, trace synthesis.

``replay`` runs the full pipeline on a recorded or synthetic trace against a
dataset file and writes a deterministic JSON report (no wall-clock values, so
identical inputs produce byte-identical reports). ``stats`` aggregates replay
reports into the per-session metrics table; ``bench`` measures per-stage
latency over synthetic datasets of growing size.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from pathlib import Path
from typing import List, Optional, Sequence

import click

from .clustering import MoveLog
from .errors import UnreadableSourceError
from .estimator import SpatialHighlighter
from .geometry import MovePoint, ViewportRef
from .highlight import build_inverted_indexes
from .ingestion import Dataset, load_dataset
from .quadtree import build_quadtree
from .session import serialize_result
from .synth import default_viewport, synthetic_dataset, synthetic_trace

BENCH_SIZES = (100, 1000, 2000, 4000, 10000)


def load_trace(path: str | Path) -> List[MovePoint]:
    """Read a record-per-line {x, y, t} trace with session-relative t in ms."""
    moves = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    moves.append(MovePoint(x=float(rec["x"]), y=float(rec["y"]), t=float(rec["t"])))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise UnreadableSourceError(f"{path}:{lineno}: bad trace record: {exc}") from exc
    except OSError as exc:
        raise UnreadableSourceError(f"cannot read trace {path}: {exc}") from exc
    return moves


def write_trace(moves: Sequence[MovePoint], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in moves:
            fh.write(json.dumps({"x": m.x, "y": m.y, "t": m.t}, sort_keys=True) + "\n")


def _format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Aligned-column console table."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for r, row in enumerate(cells):
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)))
        if r == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(widths))))
    return "\n".join(lines)


def _viewport_from_options(dataset: Dataset, lat, lon, scale) -> ViewportRef:
    vp = default_viewport(dataset)
    return ViewportRef(
        gamma=lat if lat is not None else vp.gamma,
        theta=lon if lon is not None else vp.theta,
        scale=scale if scale is not None else vp.scale,
    )


def run_replay(
    dataset_path: str,
    config_path: str,
    trace_path: str,
    g: int = 3,
    delta: float = 1.0,
    k: int = 5,
    time_limit_ms: Optional[float] = None,
    eps: float = 40.0,
    min_pts: int = 5,
    viewport_lat: Optional[float] = None,
    viewport_lon: Optional[float] = None,
    viewport_scale: Optional[float] = None,
    t_c: Optional[float] = None,
) -> dict:
    """Deterministic end-to-end run; the library entry point behind ``replay``.

    The highlight scan runs unbudgeted unless a limit is passed explicitly,
    because a wall-clock budget would make the report depend on machine speed.
    """
    dataset = load_dataset(dataset_path, config_path)
    raw_moves = load_trace(trace_path)
    log = MoveLog()
    accepted = sum(1 for m in raw_moves if log.append(m))
    viewport = _viewport_from_options(dataset, viewport_lat, viewport_lon, viewport_scale)
    engine = SpatialHighlighter(
        g=g, eps=eps, min_pts=min_pts, delta=delta, k=k, time_limit_ms=time_limit_ms
    ).fit(dataset)
    moves = list(log)
    if t_c is None:
        t_c = moves[-1].t if moves else 0.0
    result = engine.run(moves, viewport, t_c=t_c)
    doc = serialize_result(
        result,
        viewport=viewport,
        points_by_id={p.id: p for p in dataset.points},
        n_points=len(dataset),
        include_timings=False,
    )
    return {
        "inputs": {
            "dataset": str(dataset_path),
            "mapping_config": str(config_path),
            "trace": str(trace_path),
            "n_points": len(dataset),
            "dropped_rows": dataset.dropped_rows,
            "trace_events": len(raw_moves),
            "trace_stored": accepted,
        },
        "config": {
            "g": g,
            "eps": eps,
            "min_pts": min_pts,
            "delta": delta,
            "k": k,
            "time_limit_ms": time_limit_ms,
            "t_c": t_c,
            "viewport": {"gamma": viewport.gamma, "theta": viewport.theta, "scale": viewport.scale},
        },
        "result": doc,
    }


def summarize_report(report: dict) -> dict:
    """The session statistics row for one replay report."""
    res = report["result"]
    return {
        "n_points": report["inputs"]["n_points"],
        "n_regions": res["regions"]["total"],
        "n_idrs": res["idrs"]["count"],
        "points_in_idrs": res["matches"]["matched_total"],
        "coverage_pct": res["matches"]["coverage_pct"],
    }


@click.group()
def main():
    """Spatial highlighting from implicit mouse feedback."""


@main.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--g", default=3, show_default=True, help="number of time segments")
@click.option("--delta", default=1.0, show_default=True, help="feedback increment per matched point")
@click.option("--k", default=5, show_default=True, help="number of highlights")
@click.option("--time-limit-ms", default=None, type=float, help="highlight scan budget; default unbounded for determinism")
@click.option("--eps", default=40.0, show_default=True, help="DBSCAN radius in pixels")
@click.option("--min-pts", default=5, show_default=True, help="DBSCAN min neighborhood size")
@click.option("--viewport-lat", default=None, type=float, help="viewport center latitude (default: dataset center)")
@click.option("--viewport-lon", default=None, type=float, help="viewport center longitude (default: dataset center)")
@click.option("--viewport-scale", default=None, type=float, help="degrees per pixel (default: fit dataset to 800px)")
@click.option("--t-c", default=None, type=float, help="pipeline time in ms (default: last stored move)")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="write the JSON report here")
def replay(dataset_path, config_path, trace_path, g, delta, k, time_limit_ms, eps, min_pts,
           viewport_lat, viewport_lon, viewport_scale, t_c, out):
    """Replay a recorded trace through the full pipeline."""
    report = run_replay(
        dataset_path, config_path, trace_path,
        g=g, delta=delta, k=k, time_limit_ms=time_limit_ms, eps=eps, min_pts=min_pts,
        viewport_lat=viewport_lat, viewport_lon=viewport_lon, viewport_scale=viewport_scale,
        t_c=t_c,
    )
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"report written to {out}")
    else:
        click.echo(text, nl=False)
    row = summarize_report(report)
    click.echo(_format_table(
        ["points", "regions", "IDRs", "points in IDRs", "coverage %"],
        [[row["n_points"], row["n_regions"], row["n_idrs"], row["points_in_idrs"],
          f"{row['coverage_pct']:.2f}"]],
    ))


@main.command()
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="write the summary JSON here")
def stats(reports, out):
    """Aggregate replay reports into per-session region/coverage statistics."""
    rows = []
    for path in reports:
        report = json.loads(Path(path).read_text(encoding="utf-8"))
        row = summarize_report(report)
        row["report"] = str(path)
        rows.append(row)
    avg = {
        "n_regions": statistics.mean(r["n_regions"] for r in rows),
        "n_idrs": statistics.mean(r["n_idrs"] for r in rows),
        "points_in_idrs": statistics.mean(r["points_in_idrs"] for r in rows),
        "coverage_pct": statistics.mean(r["coverage_pct"] for r in rows),
    }
    table_rows = [
        [r["report"], r["n_points"], r["n_regions"], r["n_idrs"], r["points_in_idrs"],
         f"{r['coverage_pct']:.2f}"]
        for r in rows
    ]
    table_rows.append(
        ["average", "", f"{avg['n_regions']:.2f}", f"{avg['n_idrs']:.2f}",
         f"{avg['points_in_idrs']:.2f}", f"{avg['coverage_pct']:.2f}"]
    )
    click.echo(_format_table(
        ["report", "points", "regions", "IDRs", "points in IDRs", "coverage %"], table_rows
    ))
    if out:
        Path(out).write_text(
            json.dumps({"runs": rows, "average": avg}, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        click.echo(f"summary written to {out}")


@main.command()
@click.option("--sizes", default=",".join(str(s) for s in BENCH_SIZES), show_default=True,
              help="comma-separated dataset sizes")
@click.option("--seed", default=7, show_default=True)
@click.option("--repeats", default=3, show_default=True)
@click.option("--k", default=5, show_default=True)
@click.option("--time-limit-ms", default=200.0, show_default=True, type=float)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
def bench(sizes, seed, repeats, k, time_limit_ms, out):
    """Per-stage wall-clock percentiles on synthetic datasets of growing size."""
    size_list = [int(s) for s in sizes.split(",") if s.strip()]
    if any(s < 100 for s in size_list):
        raise click.BadParameter("sizes must be >= 100")
    results = []
    index_medians = []
    for n in size_list:
        dataset = synthetic_dataset(n, seed=seed)
        viewport = default_viewport(dataset)
        build_q, build_i = [], []
        stage_samples: dict[str, list[float]] = {}
        engine = None
        for rep in range(repeats):
            t0 = time.perf_counter()
            build_quadtree(dataset.points)
            build_q.append((time.perf_counter() - t0) * 1000.0)
            t0 = time.perf_counter()
            build_inverted_indexes(dataset.points, dataset.schema)
            build_i.append((time.perf_counter() - t0) * 1000.0)
            if engine is None:
                engine = SpatialHighlighter(k=k, time_limit_ms=time_limit_ms).fit(dataset)
            moves = synthetic_trace(seed=seed + rep, duration_ms=30_000.0)
            log = MoveLog()
            for m in moves:
                log.append(m)
            result = engine.run(list(log), viewport)
            for stage, ms in result.timings_ms.items():
                stage_samples.setdefault(stage, []).append(ms)
        row = {"n": n, "build_quadtree": _pcts(build_q), "build_index": _pcts(build_i)}
        for stage, samples in stage_samples.items():
            row[stage] = _pcts(samples)
        results.append(row)
        index_medians.append(row["build_index"]["p50"])
    for prev, cur, n in zip(index_medians, index_medians[1:], size_list[1:]):
        if cur < prev:
            click.echo(f"warning: index build p50 decreased at size {n}; timings may be noisy", err=True)
    headers = ["n"] + [s for s in ("build_quadtree", "build_index", "find_regions",
                                   "match_points", "update_feedback", "get_highlights")]
    table_rows = []
    for row in results:
        cells = [row["n"]]
        for stage in headers[1:]:
            p = row.get(stage)
            cells.append(f"{p['p50']:.1f}/{p['p90']:.1f}" if p else "-")
        table_rows.append(cells)
    click.echo("per-stage latency ms, p50/p90")
    click.echo(_format_table(headers, table_rows))
    if out:
        Path(out).write_text(json.dumps(results, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        click.echo(f"bench results written to {out}")


def _pcts(samples: List[float]) -> dict:
    ordered = sorted(samples)
    return {
        "p50": _percentile(ordered, 0.5),
        "p90": _percentile(ordered, 0.9),
        "max": ordered[-1],
    }


def _percentile(ordered: List[float], q: float) -> float:
    if not ordered:
        return math.nan
    idx = min(int(math.ceil(q * len(ordered))) - 1, len(ordered) - 1)
    return ordered[max(idx, 0)]


@main.command("gen-trace")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--duration-ms", default=30_000.0, show_default=True, type=float)
@click.option("--waypoints", default=4, show_default=True)
@click.option("--hz", default=5.0, show_default=True, help="samples per second")
@click.option("--box-w", default=800.0, show_default=True, help="pixel width of the wander box")
@click.option("--box-h", default=600.0, show_default=True, help="pixel height of the wander box")
@click.option("--no-revisit", is_flag=True, default=False, help="do not return to the first dwell area")
def gen_trace(out, seed, duration_ms, waypoints, hz, box_w, box_h, no_revisit):
    """Synthesize a dwell-and-move cursor trace."""
    moves = synthetic_trace(
        seed=seed, duration_ms=duration_ms, waypoints=waypoints,
        box=(box_w, box_h), hz=hz, revisit_first=not no_revisit,
    )
    write_trace(moves, out)
    click.echo(f"{len(moves)} samples written to {out}")


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(data_dir, host, port):
    """Run the session service over the datasets in a directory."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(data_dir=data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
