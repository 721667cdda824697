"""Secret-shared computation of the annotated directly-follows graph.

From a sorted chunk, every adjacent row pair (left = rows 0..n-2, right =
rows 1..n-1) contributes to the count matrix G and the summed-duration
matrix W: a same-trace flag gates the outer product of the two one-hot
vectors, and the gated mask times the timestamp difference accumulates
into W.  Dummy rows carry the all-zero one-hot, so padding can never
touch a cell.  Per-chunk results merge by plain share addition.

All accumulation happens in the 2^64 ring, so a cell's summed duration is
exact as long as it stays below 2^64; with timestamps below 2^62 that
holds for any log whose per-cell duration total fits 64 bits, which the
query layer's public magnitude guard enforces before ranking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .events import PreparedLog, assign_chunks
from .protocols import SecureEngine, SharedMatrix
from .sharing import SharedVector, peek
from .sorting import SharedEventTable, pad_to_power_of_two, parallel_sort


class MetadataMismatchError(ValueError):
    pass


@dataclass
class SharedDFG:
    counts: SharedMatrix     # G: directly-follows frequencies
    durations: SharedMatrix  # W: summed elapsed seconds

    @property
    def width(self) -> int:
        return self.counts.width

    @classmethod
    def zeros(cls, width: int) -> "SharedDFG":
        return cls(SharedMatrix.zeros(width), SharedMatrix.zeros(width))


@dataclass
class BuildStats:
    sort_seconds: float = 0.0
    dfg_seconds: float = 0.0
    chunk_rows: list = field(default_factory=list)
    event_count: int = 0


def dfg_chunk(engine: SecureEngine, table: SharedEventTable) -> SharedDFG:
    """Accumulate one sorted chunk into a shared DFG (three protocol stages)."""
    n = len(table)
    m = table.width
    if n < 2:
        return SharedDFG.zeros(m)
    pairs = n - 1
    trace_l = table.trace.slice(0, pairs)
    trace_r = table.trace.slice(1, n)
    flag = engine.eq(trace_l, trace_r)

    # ring subtraction is local; cross-trace pairs are annihilated by the flag
    dt = table.ts.slice(1, n) - table.ts.slice(0, pairs)

    left = SharedVector.concat(
        [table.onehot[p].slice(0, pairs) for p in range(m) for _ in range(m)])
    right = SharedVector.concat(
        [table.onehot[q].slice(1, n) for _ in range(m) for q in range(m)])
    outer = engine.mul_vec(left, right)                      # lanes [p][q][pair]
    flag_tiled = SharedVector([np.tile(c, m * m) for c in flag.comps])
    masked = engine.mul_vec(outer, flag_tiled)
    counts = SharedMatrix(masked.sum_groups(m * m), m)
    dt_tiled = SharedVector([np.tile(c, m * m) for c in dt.comps])
    lagged = engine.mul_vec(masked, dt_tiled)
    durations = SharedMatrix(lagged.sum_groups(m * m), m)
    return SharedDFG(counts, durations)


def merge_dfgs(parts: list[SharedDFG]) -> SharedDFG:
    """Cell-wise share addition; no communication."""
    if not parts:
        raise ValueError("nothing to merge")
    widths = {p.width for p in parts}
    if len(widths) != 1:
        raise MetadataMismatchError(f"DFG widths differ: {sorted(widths)}")
    out = parts[0]
    for p in parts[1:]:
        out = SharedDFG(out.counts + p.counts, out.durations + p.durations)
    return out


def _check_compatible(prep_a: PreparedLog, prep_b: PreparedLog) -> None:
    if prep_a.width != prep_b.width:
        raise MetadataMismatchError(
            f"one-hot widths differ: {prep_a.width} vs {prep_b.width}")
    if prep_a.l_max != prep_b.l_max:
        raise MetadataMismatchError(
            f"padded trace lengths differ: {prep_a.l_max} vs {prep_b.l_max}")
    if prep_a.trace_count != prep_b.trace_count:
        raise MetadataMismatchError(
            f"trace counts differ: {prep_a.trace_count} vs {prep_b.trace_count}")
    if prep_a.case_order != prep_b.case_order:
        raise MetadataMismatchError("parties disagree on the canonical case order")


def _combine_chunk(engine: SecureEngine, chunk_a: PreparedLog,
                   chunk_b: PreparedLog) -> SharedEventTable:
    """Interleave both parties' rows per trace and secret-share the columns."""
    L = chunk_a.l_max
    slots = chunk_a.trace_count
    width = chunk_a.width

    def interleave(col_a, col_b):
        return np.concatenate(
            [col_a.reshape(slots, L), col_b.reshape(slots, L)], axis=1).reshape(-1)

    trace = interleave(chunk_a.trace_index, chunk_b.trace_index)
    ts = interleave(chunk_a.timestamp, chunk_b.timestamp)
    act = interleave(chunk_a.act_index.astype(np.int64), chunk_b.act_index.astype(np.int64))
    n = len(trace)
    return SharedEventTable(
        engine.share_vector(trace),
        engine.share_vector(ts),
        SharedVector.public(np.arange(n, dtype=np.uint64)),  # public tie-break rank
        [engine.share_vector((act == p).astype(np.uint64)) for p in range(width)],
    )


def build_dfg(engine: SecureEngine, prep_a: PreparedLog, prep_b: PreparedLog,
              chunk_count: int) -> tuple[SharedDFG, BuildStats]:
    """Full pipeline from two prepared party logs to one merged shared DFG."""
    _check_compatible(prep_a, prep_b)
    stats = BuildStats(event_count=prep_a.event_count() + prep_b.event_count())
    chunks_a = assign_chunks(prep_a, chunk_count)
    chunks_b = assign_chunks(prep_b, chunk_count)

    tables = [_combine_chunk(engine, ca, cb) for ca, cb in zip(chunks_a, chunks_b)]
    padded, orig_sizes = [], []
    for t in tables:
        p, orig = pad_to_power_of_two(t)
        padded.append(p)
        orig_sizes.append(orig)
    stats.chunk_rows = orig_sizes

    t0 = time.perf_counter()
    with engine.net.phase("sort"):
        parallel_sort(engine, padded)
    stats.sort_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    with engine.net.phase("dfg"):
        parts = [dfg_chunk(engine, tab.sliced(0, orig))
                 for tab, orig in zip(padded, orig_sizes)]
        merged = merge_dfgs(parts)
    stats.dfg_seconds = time.perf_counter() - t0
    return merged, stats


def reveal_dfg(engine: SecureEngine, dfg: SharedDFG) -> tuple[list[list[int]], list[list[int]]]:
    """Open the full DFG (test mode only; spends 2*width^2 of reveal budget)."""
    w = dfg.width
    g = engine.reveal(dfg.counts.vec)
    d = engine.reveal(dfg.durations.vec)
    to_mat = lambda v: [[int(v[p * w + q]) for q in range(w)] for p in range(w)]
    return to_mat(g), to_mat(d)


def peek_dfg(dfg: SharedDFG) -> tuple[list[list[int]], list[list[int]]]:
    """Reconstruct without touching the reveal counter (unit tests only)."""
    w = dfg.width
    g, d = peek(dfg.counts.vec), peek(dfg.durations.vec)
    to_mat = lambda v: [[int(v[p * w + q]) for q in range(w)] for p in range(w)]
    return to_mat(g), to_mat(d)
