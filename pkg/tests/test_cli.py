import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from geohighlight.cli import load_trace, main, run_replay, summarize_report, write_trace
from geohighlight.errors import UnreadableSourceError
from geohighlight.synth import synthetic_trace

DATA = Path(__file__).resolve().parents[1] / "src" / "geohighlight" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden" / "sample_replay.json"

SAMPLE_ARGS = [
    "--dataset", str(DATA / "sample_points.csv"),
    "--config", str(DATA / "sample_points.config.json"),
    "--trace", str(DATA / "sample_trace.jsonl"),
]


def test_trace_round_trip(tmp_path):
    moves = synthetic_trace(seed=5, duration_ms=5_000.0)
    path = tmp_path / "trace.jsonl"
    write_trace(moves, path)
    back = load_trace(path)
    assert [(m.x, m.y, m.t) for m in back] == [(m.x, m.y, m.t) for m in moves]


def test_trace_parse_error_reports_line(tmp_path):
    path = tmp_path / "trace.jsonl"
    path.write_text('{"x": 1, "y": 2, "t": 3}\n{"x": broken\n', encoding="utf-8")
    with pytest.raises(UnreadableSourceError) as err:
        load_trace(path)
    assert ":2:" in str(err.value)


def test_empty_trace_empty_idr_report(tmp_path):
    trace = tmp_path / "empty.jsonl"
    trace.write_text("", encoding="utf-8")
    report = run_replay(
        str(DATA / "sample_points.csv"),
        str(DATA / "sample_points.config.json"),
        str(trace),
    )
    assert report["result"]["idrs"]["count"] == 0
    assert report["result"]["matches"]["coverage_pct"] == 0.0
    assert report["result"]["highlights"]["cold_start"] is True


def test_replay_deterministic_bytes(tmp_path):
    runner = CliRunner()
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    for out in (out_a, out_b):
        result = runner.invoke(main, ["replay", *SAMPLE_ARGS, "--out", str(out)])
        assert result.exit_code == 0, result.output
    assert out_a.read_bytes() == out_b.read_bytes()


def test_replay_matches_golden():
    report = run_replay(
        str(DATA / "sample_points.csv"),
        str(DATA / "sample_points.config.json"),
        str(DATA / "sample_trace.jsonl"),
    )
    golden = json.loads(GOLDEN.read_text(encoding="utf-8"))
    # paths in the inputs section differ by invocation; the computation must not
    assert json.dumps(report["result"], sort_keys=True) == json.dumps(golden["result"], sort_keys=True)
    assert json.dumps(report["config"], sort_keys=True) == json.dumps(golden["config"], sort_keys=True)


def test_replay_coverage_identity():
    report = run_replay(
        str(DATA / "sample_points.csv"),
        str(DATA / "sample_points.config.json"),
        str(DATA / "sample_trace.jsonl"),
    )
    row = summarize_report(report)
    assert row["coverage_pct"] == 100.0 * row["points_in_idrs"] / row["n_points"]


def test_stats_command(tmp_path):
    runner = CliRunner()
    reports = []
    for i, g in enumerate((2, 3)):
        out = tmp_path / f"run{i}.json"
        result = runner.invoke(main, ["replay", *SAMPLE_ARGS, "--g", str(g), "--out", str(out)])
        assert result.exit_code == 0, result.output
        reports.append(out)
    summary_path = tmp_path / "summary.json"
    result = runner.invoke(main, ["stats", *map(str, reports), "--out", str(summary_path)])
    assert result.exit_code == 0, result.output
    assert "average" in result.output
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    assert len(summary["runs"]) == 2
    mean_idrs = sum(r["n_idrs"] for r in summary["runs"]) / 2
    assert summary["average"]["n_idrs"] == pytest.approx(mean_idrs)
    for run in summary["runs"]:
        assert run["coverage_pct"] == pytest.approx(
            100.0 * run["points_in_idrs"] / run["n_points"]
        )


def test_gen_trace_deterministic(tmp_path):
    runner = CliRunner()
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    for out in (a, b):
        result = runner.invoke(main, ["gen-trace", "--out", str(out), "--seed", "3"])
        assert result.exit_code == 0, result.output
    assert a.read_bytes() == b.read_bytes()
    different = tmp_path / "c.jsonl"
    runner.invoke(main, ["gen-trace", "--out", str(different), "--seed", "4"])
    assert different.read_bytes() != a.read_bytes()


def test_bench_smoke(tmp_path):
    runner = CliRunner()
    out = tmp_path / "bench.json"
    result = runner.invoke(
        main, ["bench", "--sizes", "100,150", "--repeats", "1", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = json.loads(out.read_text(encoding="utf-8"))
    assert [r["n"] for r in rows] == [100, 150]
    for row in rows:
        for stage in ("build_quadtree", "build_index", "find_regions",
                      "match_points", "update_feedback", "get_highlights"):
            assert row[stage]["p50"] >= 0.0


def test_bench_rejects_small_sizes():
    runner = CliRunner()
    result = runner.invoke(main, ["bench", "--sizes", "50"])
    assert result.exit_code != 0
