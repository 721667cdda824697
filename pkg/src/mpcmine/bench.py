"""Benchmark sweeps over chunk counts: wall time, throughput, traffic.

Bytes and rounds are deterministic for a fixed seed, so repetitions only
average the wall-clock numbers; the traffic columns are asserted equal
across runs rather than averaged.
"""

from __future__ import annotations

import csv
import io
from dataclasses import replace

from .pipeline import RunConfig, run_pipeline

SWEEP_COLUMNS = [
    "log", "backend", "chunks", "repetitions", "events",
    "sort_seconds", "dfg_seconds", "query_seconds", "total_seconds",
    "events_per_second",
    "sort_bytes_per_party", "dfg_bytes_per_party", "total_bytes",
    "sort_rounds", "dfg_rounds", "comparators",
]


def _phase_stat(report, phase: str, key: str):
    info = report.phases.get(phase)
    if not info:
        return 0
    if key == "bytes_per_party":
        sent = info["bytes_sent_per_party"]
        return sum(sent) / len(sent)
    return info[key]


def bench_sweep(events_a, events_b, config: RunConfig, chunk_counts,
                repetitions: int = 1) -> list[dict]:
    """One row per chunk count, wall times averaged over `repetitions` runs."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rows = []
    for chunks in chunk_counts:
        walls = {"sort": 0.0, "dfg": 0.0, "query": 0.0, "total": 0.0}
        base = None
        for _ in range(repetitions):
            result = run_pipeline(events_a, events_b, replace(config, chunk_count=chunks))
            for key in walls:
                walls[key] += result.report.wall_seconds[key]
            traffic = (result.report.phases, result.report.comparators)
            if base is None:
                base, report = traffic, result.report
            elif base != traffic:
                raise AssertionError("traffic varied across repetitions of one config")
        walls = {k: v / repetitions for k, v in walls.items()}
        total = walls["total"]
        rows.append({
            "log": config.label,
            "backend": config.backend,
            "chunks": chunks,
            "repetitions": repetitions,
            "events": report.event_count,
            "sort_seconds": walls["sort"],
            "dfg_seconds": walls["dfg"],
            "query_seconds": walls["query"],
            "total_seconds": total,
            "events_per_second": report.event_count / total if total > 0 else 0.0,
            "sort_bytes_per_party": _phase_stat(report, "sort", "bytes_per_party"),
            "dfg_bytes_per_party": _phase_stat(report, "dfg", "bytes_per_party"),
            "total_bytes": sum(p["total_bytes"] for p in report.phases.values()),
            "sort_rounds": _phase_stat(report, "sort", "rounds"),
            "dfg_rounds": _phase_stat(report, "dfg", "rounds"),
            "comparators": report.comparators,
        })
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
