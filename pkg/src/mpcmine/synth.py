"""Seeded synthetic event logs with controlled shape.

Used by the test fixtures and the benchmark harness; real public logs are
referenced by path and never redistributed with the package.
"""

from __future__ import annotations

import io

import numpy as np

from .events import RawEvent


def synth_log(seed: int, traces: int, min_len: int = 1, max_len: int = 10,
              activities: int = 4, start_ts: int = 1_600_000_000,
              max_step: int = 3600, tie_fraction: float = 0.1) -> list[RawEvent]:
    """Random log: `traces` cases with lengths in [min_len, max_len].

    tie_fraction of the steps are zero so equal timestamps inside a trace
    (and across parties) actually occur and exercise the tie handling.
    """
    rng = np.random.default_rng(seed)
    names = [f"A{i:02d}" for i in range(activities)]
    events = []
    for t in range(traces):
        case = f"c{t:05d}"
        length = int(rng.integers(min_len, max_len + 1))
        ts = start_ts + int(rng.integers(0, 10_000_000))
        for _ in range(length):
            events.append(RawEvent(case, names[int(rng.integers(0, activities))], ts))
            if rng.random() < tie_fraction:
                step = 0
            else:
                step = int(rng.integers(1, max_step + 1))
            ts += step
    order = rng.permutation(len(events))
    return [events[i] for i in order]


def bpic13_like(seed: int = 13, cases: int = 200) -> list[RawEvent]:
    """A log with the public incident-management log's shape at downsample
    scale: 6 activities, trace lengths mostly short with a long tail to 35."""
    rng = np.random.default_rng(seed)
    names = [f"A{i:02d}" for i in range(6)]
    events = []
    for t in range(cases):
        case = f"c{t:05d}"
        length = 1 + min(34, int(rng.geometric(0.25)))
        ts = 1_360_000_000 + int(rng.integers(0, 30_000_000))
        for _ in range(length):
            events.append(RawEvent(case, names[int(rng.integers(0, 6))], ts))
            ts += int(rng.integers(0, 86_400))
    order = rng.permutation(len(events))
    return [events[i] for i in order]


def to_csv(events) -> str:
    buf = io.StringIO()
    buf.write("case_id,activity,timestamp\n")
    for e in events:
        buf.write(f"{e.case_id},{e.activity},{e.timestamp}\n")
    return buf.getvalue()
