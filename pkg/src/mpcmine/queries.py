"""Analysis queries over the secret-shared DFG.

Only query outputs are ever opened: top-k selections run an oblivious
tournament over shared (value, cell-index) tuples and reconstruct just
the winners, so the reveal counter advances by exactly the documented
output arity.  Ranking by mean waiting time avoids secure division by
comparing cross-products d1*c2 vs d2*c1, which is sound while a public
magnitude guard keeps every product below 2^63.
"""

from __future__ import annotations

import numpy as np

from .dfg import SharedDFG
from .events import PublicMetadata
from .protocols import SecureEngine
from .results import (DEFAULT_SPAN_BOUND, MagnitudeGuardError, QueryEntry,
                      QueryError, QueryResult, check_magnitude_guard,
                      handoff_domain)
from .sharing import SharedVector

__all__ = [
    "DEFAULT_SPAN_BOUND", "MagnitudeGuardError", "QueryEntry", "QueryError",
    "QueryResult", "check_magnitude_guard", "handoff_domain", "reveal_cell",
    "topk_handoffs", "topk_bottlenecks", "handoff_waiting_time", "cell_query",
]


def _true_width(meta: PublicMetadata) -> int:
    return meta.m_a + meta.m_b


def reveal_cell(engine: SecureEngine, dfg: SharedDFG, p: int, q: int,
                meta: PublicMetadata) -> tuple[int, int]:
    """Open one cell's (count, summed duration); spends exactly two reveals."""
    true_w = _true_width(meta)
    if not (0 <= p < true_w and 0 <= q < true_w):
        raise QueryError(f"cell ({p},{q}) is outside the real activity range "
                         f"(decoy columns start at {true_w})")
    opened = engine.reveal(SharedVector.concat([dfg.counts.cell(p, q),
                                                dfg.durations.cell(p, q)]))
    return int(opened[0]), int(opened[1])


def _gather_cells(dfg: SharedDFG, cells: list[tuple[int, int]]):
    lin = np.asarray([p * dfg.width + q for p, q in cells])
    return {
        "idx": SharedVector.public(lin.astype(np.uint64)),
        "count": dfg.counts.vec.take(lin),
        "dur": dfg.durations.vec.take(lin),
    }


def _tournament(engine: SecureEngine, cand: dict, right_wins) -> dict:
    """Reduce candidate lanes to one by pairwise knockout.

    Lanes are ordered by ascending cell index and ties keep the left lane,
    so equal values resolve to the smaller linearized index.  right_wins
    gets the even/odd lane halves and returns a shared strict-win bit.
    """
    fields = list(cand)
    while len(cand[fields[0]]) > 1:
        n = len(cand[fields[0]])
        pairs = n // 2
        even_idx = np.arange(0, 2 * pairs, 2)
        odd_idx = np.arange(1, 2 * pairs, 2)
        even = {f: cand[f].take(even_idx) for f in fields}
        odd = {f: cand[f].take(odd_idx) for f in fields}
        rw = right_wins(engine, even, odd)
        rw_tiled = SharedVector([np.tile(c, len(fields)) for c in rw.comps])
        merged = engine.mux(rw_tiled,
                            SharedVector.concat([odd[f] for f in fields]),
                            SharedVector.concat([even[f] for f in fields]))
        parts = merged.split([pairs] * len(fields))
        nxt = dict(zip(fields, parts))
        if n % 2:  # odd lane count: the last (largest-index) lane passes through
            nxt = {f: SharedVector.concat([nxt[f], cand[f].slice(n - 1, n)])
                   for f in fields}
        cand = nxt
    return cand


def _count_order(engine: SecureEngine, even: dict, odd: dict) -> SharedVector:
    return engine.lt(even["count"], odd["count"])


def _mean_order(engine: SecureEngine, even: dict, odd: dict) -> SharedVector:
    # right strictly better <=> valid_r & (!valid_l | dur_r*cnt_l > dur_l*cnt_r)
    n = len(even["count"])
    prods = engine.mul_vec(
        SharedVector.concat([even["dur"], odd["dur"]]),
        SharedVector.concat([odd["count"], even["count"]]))
    t_even, t_odd = prods.split([n, n])
    gt = engine.lt(t_even, t_odd)
    a = engine.mul_vec(even["valid"], gt)
    keep_right = a + even["valid"].neg().add_public(np.ones(n, dtype=np.uint64))
    return engine.mul_vec(odd["valid"], keep_right)


def topk_handoffs(engine: SecureEngine, dfg: SharedDFG, k: int,
                  meta: PublicMetadata) -> QueryResult:
    """The k most frequent cross-party cells; reveals only k (index, count) pairs."""
    domain = handoff_domain(meta)
    if k > len(domain):
        raise QueryError(f"k={k} exceeds the {len(domain)} hand-off cells")
    remaining = list(domain)
    entries = []
    reveals = 0
    for _ in range(k):
        cand = _gather_cells(dfg, remaining)
        winner = _tournament(engine, {f: cand[f] for f in ("idx", "count")}, _count_order)
        opened = engine.reveal(SharedVector.concat([winner["idx"], winner["count"]]))
        lin, cnt = int(opened[0]), int(opened[1])
        reveals += 2
        entries.append(QueryEntry(lin // dfg.width, lin % dfg.width, count=cnt))
        remaining.remove((lin // dfg.width, lin % dfg.width))
    return QueryResult("topk-handoffs", entries, k=k, reveal_count=reveals)


def topk_bottlenecks(engine: SecureEngine, dfg: SharedDFG, k: int, meta: PublicMetadata,
                     span_bound: int = DEFAULT_SPAN_BOUND) -> QueryResult:
    """The k cells with largest mean waiting time, division-free.

    Cells that were never observed (count 0) rank last via a validity bit;
    reveals k (index, count, duration) triples and the consumer divides in
    the clear.
    """
    check_magnitude_guard(meta, span_bound)
    true_w = _true_width(meta)
    domain = [(p, q) for p in range(true_w) for q in range(true_w)]
    if k > len(domain):
        raise QueryError(f"k={k} exceeds the {len(domain)} real cells")
    remaining = list(domain)
    entries = []
    reveals = 0
    for _ in range(k):
        cand = _gather_cells(dfg, remaining)
        zero = engine.eq(cand["count"], SharedVector.zeros(len(remaining)))
        cand["valid"] = zero.neg().add_public(np.ones(len(remaining), dtype=np.uint64))
        winner = _tournament(engine, cand, _mean_order)
        opened = engine.reveal(SharedVector.concat(
            [winner["idx"], winner["count"], winner["dur"]]))
        lin, cnt, dur = int(opened[0]), int(opened[1]), int(opened[2])
        reveals += 3
        entries.append(QueryEntry(lin // dfg.width, lin % dfg.width,
                                  count=cnt, total_seconds=dur))
        remaining.remove((lin // dfg.width, lin % dfg.width))
    return QueryResult("topk-bottlenecks", entries, k=k, reveal_count=reveals)


def handoff_waiting_time(engine: SecureEngine, dfg: SharedDFG, p: int, q: int,
                         meta: PublicMetadata) -> QueryResult:
    """Mean seconds between one cross-party pair; count 0 means no observation."""
    if (p, q) not in handoff_domain(meta):
        raise QueryError(f"cell ({p},{q}) is not a hand-off between the parties")
    cnt, dur = reveal_cell(engine, dfg, p, q, meta)
    entry = QueryEntry(p, q, count=cnt, total_seconds=dur if cnt else 0)
    return QueryResult("handoff-wait", [entry], reveal_count=2)


def cell_query(engine: SecureEngine, dfg: SharedDFG, p: int, q: int,
               meta: PublicMetadata) -> QueryResult:
    cnt, dur = reveal_cell(engine, dfg, p, q, meta)
    return QueryResult("cell", [QueryEntry(p, q, count=cnt, total_seconds=dur)],
                       reveal_count=2)
