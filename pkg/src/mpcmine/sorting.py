"""Data-independent sorting of secret-shared event rows.

A Batcher odd-even mergesort network orders rows by the composite key
(trace index, timestamp, input sequence number).  The comparator schedule
depends only on the row count, never on the data, which is what makes the
sort safe to run over shares: positions are public, values never leave
the shared domain.  The trailing sequence-number key makes the order a
stable sort by (trace, timestamp), so the outcome is reproducible and
matches the plaintext reference exactly even on timestamp ties.

Comparators that sit at the same network stage are batched into single
protocol calls; with several equal-length chunks the batching spans all
chunks, so the round count of sorting c chunks equals that of sorting one.
"""

from __future__ import annotations

import numpy as np

from .protocols import SecureEngine
from .sharing import LengthMismatchError, SharedVector

# Rows appended to reach a power of two are publicly known padding; this
# sentinel exceeds every real trace index so they sink to the tail.
TRACE_SENTINEL = 1 << 62
TS_SENTINEL = 1 << 62


def batcher_stages(n: int) -> list[list[tuple[int, int]]]:
    """Comparator schedule for n = 2^k rows, as stages of disjoint pairs."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"row count must be a power of two, got {n}")
    stages = []
    p = 1
    while p < n:
        k = p
        while k >= 1:
            pairs = []
            j = k % p
            while j + k < n:
                for i in range(min(k, n - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        pairs.append((i + j, i + j + k))
                j += 2 * k
            stages.append(pairs)
            k //= 2
        p *= 2
    return stages


def comparator_count(n: int) -> int:
    return sum(len(s) for s in batcher_stages(n))


class SharedEventTable:
    """Column-oriented secret-shared chunk: trace, timestamp, sequence, one-hots.

    The table owns its column storage: sorting scatters new rows into the
    component arrays in place.  Views produced by sliced() share storage and
    are meant for read-only downstream passes.
    """

    def __init__(self, trace: SharedVector, ts: SharedVector, seq: SharedVector,
                 onehot: list[SharedVector]):
        self.trace = trace
        self.ts = ts
        self.seq = seq
        self.onehot = onehot
        n = len(trace)
        for col in (ts, seq, *onehot):
            if len(col) != n:
                raise LengthMismatchError("table columns differ in length")

    def __len__(self) -> int:
        return len(self.trace)

    @property
    def width(self) -> int:
        return len(self.onehot)

    def columns(self) -> list[SharedVector]:
        return [self.trace, self.ts, self.seq, *self.onehot]

    def sliced(self, start: int, stop: int) -> "SharedEventTable":
        return SharedEventTable(self.trace.slice(start, stop), self.ts.slice(start, stop),
                                self.seq.slice(start, stop),
                                [c.slice(start, stop) for c in self.onehot])


def pad_to_power_of_two(table: SharedEventTable) -> tuple[SharedEventTable, int]:
    """Append public all-dummy rows (sentinel keys, zero one-hot) up to 2^k.

    Returns the padded table and the original row count so callers can
    slice the padding back off after sorting.
    """
    n = len(table)
    target = 1 << max(0, (n - 1).bit_length())
    if target == n:
        return table, n
    extra = target - n
    pad_trace = SharedVector.public(np.full(extra, TRACE_SENTINEL, dtype=np.uint64))
    pad_ts = SharedVector.public(np.full(extra, TS_SENTINEL, dtype=np.uint64))
    pad_seq = SharedVector.public(np.arange(n, target, dtype=np.uint64))
    pad_zero = SharedVector.public(np.zeros(extra, dtype=np.uint64))
    return SharedEventTable(
        SharedVector.concat([table.trace, pad_trace]),
        SharedVector.concat([table.ts, pad_ts]),
        SharedVector.concat([table.seq, pad_seq]),
        [SharedVector.concat([c, pad_zero]) for c in table.onehot],
    ), n


def _run_stage(engine: SecureEngine, tables: list[SharedEventTable],
               pairs: list[tuple[int, int]]) -> None:
    """Execute one network stage, batching its comparators across all chunks."""
    if not pairs:
        return
    i_idx = np.asarray([p[0] for p in pairs])
    j_idx = np.asarray([p[1] for p in pairs])
    cols_i = [SharedVector.concat([c.take(i_idx) for c in t.columns()]) for t in tables]
    cols_j = [SharedVector.concat([c.take(j_idx) for c in t.columns()]) for t in tables]
    ncols = len(tables[0].columns())
    lanes = len(pairs)

    # swap when key_j < key_i, lexicographic over (trace, ts, seq)
    key_pairs = []
    for col_of in (lambda t: t.trace, lambda t: t.ts, lambda t: t.seq):
        at_j = SharedVector.concat([col_of(t).take(j_idx) for t in tables])
        at_i = SharedVector.concat([col_of(t).take(i_idx) for t in tables])
        key_pairs.append((at_j, at_i))
    swap = engine.lex_less(key_pairs)  # lane order: table-major

    # one multiplication moves both rows: delta = swap * (row_j - row_i)
    big_i = SharedVector.concat(cols_i)
    big_j = SharedVector.concat(cols_j)
    swap_tiled = SharedVector.concat(
        [SharedVector([np.tile(c[t * lanes:(t + 1) * lanes], ncols) for c in swap.comps])
         for t in range(len(tables))])
    delta = engine.mul_vec(swap_tiled, big_j - big_i)
    new_i = big_i + delta
    new_j = big_j - delta

    block = ncols * lanes
    for t, table in enumerate(tables):
        for c_pos, col in enumerate(table.columns()):
            lo = t * block + c_pos * lanes
            ni = new_i.slice(lo, lo + lanes)
            nj = new_j.slice(lo, lo + lanes)
            for comp in range(3):
                col.comps[comp][i_idx] = ni.comps[comp]
                col.comps[comp][j_idx] = nj.comps[comp]
    engine.op_counts["comparators"] = (
        engine.op_counts.get("comparators", 0) + lanes * len(tables))


def compare_swap(engine: SecureEngine, table: SharedEventTable, i: int, j: int) -> SharedEventTable:
    """Obliviously order rows i < j by the composite key (positions are public)."""
    if not 0 <= i < j < len(table):
        raise ValueError(f"invalid comparator positions ({i}, {j}) for {len(table)} rows")
    _run_stage(engine, [table], [(i, j)])
    return table


def sort_chunk(engine: SecureEngine, table: SharedEventTable) -> SharedEventTable:
    """Sort one chunk with the Batcher network (row count must be 2^k)."""
    return parallel_sort(engine, [table])[0]


def parallel_sort(engine: SecureEngine, chunks: list[SharedEventTable]) -> list[SharedEventTable]:
    """Sort every chunk, fusing same-stage comparators across chunks.

    All chunks must have equal power-of-two length; the round count equals
    that of sorting a single chunk, only lane widths grow.
    """
    sizes = {len(c) for c in chunks}
    if len(sizes) != 1:
        raise LengthMismatchError(f"chunks must have equal length, got {sorted(sizes)}")
    n = sizes.pop()
    for stage in batcher_stages(n):
        _run_stage(engine, chunks, stage)
    return chunks
