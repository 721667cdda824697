"""Command line client for the service.

All commands go through the HTTP API: against a remote instance when
--server is given, otherwise against the app mounted in-process, so the
CLI stays a thin client either way.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

        from .service.app import create_app
        return TestClient(create_app())


def _log_fields(log, log_a, log_b, split):
    if log is not None:
        return {"log_csv": Path(log).read_text(), "split": split,
                "label": Path(log).stem}
    if log_a is None or log_b is None:
        raise click.UsageError("give --log, or both --log-a and --log-b")
    return {"log_a_csv": Path(log_a).read_text(), "log_b_csv": Path(log_b).read_text(),
            "label": Path(log_a).stem}


def _post(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


@click.group()
def main():
    """Privacy-preserving directly-follows analysis over split event logs."""


@main.command()
@click.option("--log", type=click.Path(exists=True), help="combined log to split")
@click.option("--log-a", type=click.Path(exists=True), help="party A's log")
@click.option("--log-b", type=click.Path(exists=True), help="party B's log")
@click.option("--split", default="round-robin", show_default=True,
              type=click.Choice(["round-robin"]))
@click.option("--chunks", default=1, show_default=True)
@click.option("--pad-activities", default=0, show_default=True)
@click.option("--backend", default="secure", show_default=True,
              type=click.Choice(["secure", "clear"]))
@click.option("--query", default="topk-handoffs", show_default=True,
              type=click.Choice(["topk-handoffs", "topk-bottlenecks", "cell", "handoff-wait"]))
@click.option("--k", default=3, show_default=True)
@click.option("--source", type=int, help="source index for cell/handoff-wait")
@click.option("--target", type=int, help="target index for cell/handoff-wait")
@click.option("--seed", default=0, show_default=True)
@click.option("--l-max", type=int, help="inflate trace padding to this length")
@click.option("--report", "report_path", type=click.Path(), help="write the full run report JSON")
@click.option("--unsafe-reveal-dfg", is_flag=True,
              help="open the whole DFG in the report (test mode only)")
@click.option("--server", help="base URL of a running service; default runs in-process")
def run(log, log_a, log_b, split, chunks, pad_activities, backend, query, k,
        source, target, seed, l_max, report_path, unsafe_reveal_dfg, server):
    """Run the full pipeline once and print the query answer."""
    payload = _log_fields(log, log_a, log_b, split)
    payload.update({
        "chunks": chunks,
        "pad_activities": pad_activities,
        "backend": backend,
        "seed": seed,
        "l_max": l_max,
        "unsafe_reveal_dfg": unsafe_reveal_dfg,
        "query": {"query": query, "k": k, "source": source, "target": target},
    })
    with _client(server) as client:
        body = _post(client, "/pipeline/run", payload)
    if report_path:
        Path(report_path).write_text(json.dumps(body, indent=2) + "\n")
    click.echo(json.dumps(body["query"], indent=2))
    report = body["report"]
    click.echo(f"# backend={report['backend']} chunks={report['chunk_count']} "
               f"events={report['event_count']} "
               f"total={report['wall_seconds']['total']:.3f}s "
               f"throughput={report['throughput_events_per_second']:.0f} ev/s",
               err=True)


@main.command()
@click.option("--log", type=click.Path(exists=True))
@click.option("--log-a", type=click.Path(exists=True))
@click.option("--log-b", type=click.Path(exists=True))
@click.option("--split", default="round-robin", type=click.Choice(["round-robin"]))
@click.option("--chunk-counts", default="1,2,4,8", show_default=True,
              help="comma-separated chunk counts")
@click.option("--repetitions", default=1, show_default=True)
@click.option("--backend", default="secure", type=click.Choice(["secure", "clear"]))
@click.option("--seed", default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(), help="write the sweep CSV here")
@click.option("--server", help="base URL of a running service; default runs in-process")
def sweep(log, log_a, log_b, split, chunk_counts, repetitions, backend, seed,
          csv_path, server):
    """Benchmark sweep over chunk counts (time, throughput, traffic)."""
    payload = _log_fields(log, log_a, log_b, split)
    payload.update({
        "chunk_counts": [int(c) for c in chunk_counts.split(",")],
        "repetitions": repetitions,
        "backend": backend,
        "seed": seed,
    })
    with _client(server) as client:
        body = _post(client, "/bench/sweep", payload)
    if csv_path:
        Path(csv_path).write_text(body["csv"])
        click.echo(f"wrote {csv_path}", err=True)
    else:
        sys.stdout.write(body["csv"])


@main.command()
@click.option("--seed", default=7, show_default=True)
@click.option("--traces", default=50, show_default=True)
@click.option("--min-len", default=1, show_default=True)
@click.option("--max-len", default=10, show_default=True)
@click.option("--activities", default=6, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def gen(seed, traces, min_len, max_len, activities, out):
    """Write a seeded synthetic log as CSV."""
    from .synth import synth_log, to_csv
    events = synth_log(seed, traces, min_len, max_len, activities)
    Path(out).write_text(to_csv(events))
    click.echo(f"wrote {len(events)} events to {out}", err=True)


@main.command()
@click.option("--server", help="base URL of a running service; default runs in-process")
def costs(server):
    """Print the measured per-primitive cost table (rounds, bytes/party/lane)."""
    with _client(server) as client:
        resp = client.get("/costs")
    click.echo(json.dumps(resp.json(), indent=2))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn
    uvicorn.run("mpcmine.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
