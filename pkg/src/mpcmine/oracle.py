"""Plaintext reference pipeline: the ground truth the secure path must match.

Groups events per case, stable-sorts each case by timestamp (first party's
events ahead of the second's on ties, mirroring the documented combined
row order), and accumulates adjacent pairs into (G, W).  Shares no code
with the protocol stack; this is the brute-force oracle used by the
equivalence tests and the `clear` backend.
"""

from __future__ import annotations

from functools import cmp_to_key

from .events import PublicMetadata
from .results import (DEFAULT_SPAN_BOUND, QueryEntry, QueryResult,
                      check_magnitude_guard, handoff_domain)


def plain_dfg(events_a, events_b, index_of, width: int):
    """(G, W) as integer matrices from both parties' raw events.

    index_of maps activity name to its global one-hot position.
    """
    per_case: dict = {}
    for bucket, events in (("a", events_a), ("b", events_b)):
        for e in events:
            per_case.setdefault(e.case_id, {"a": [], "b": []})[bucket].append(e)
    G = [[0] * width for _ in range(width)]
    W = [[0] * width for _ in range(width)]
    for case in per_case.values():
        combined = sorted(case["a"] + case["b"], key=lambda e: e.timestamp)
        for prev, nxt in zip(combined, combined[1:]):
            p, q = index_of[prev.activity], index_of[nxt.activity]
            G[p][q] += 1
            W[p][q] += nxt.timestamp - prev.timestamp
    return G, W


def plain_topk_handoffs(G, k: int, meta: PublicMetadata) -> QueryResult:
    domain = handoff_domain(meta)
    if k > len(domain):
        raise ValueError(f"k={k} exceeds the {len(domain)} hand-off cells")
    ranked = sorted(domain, key=lambda pq: (-G[pq[0]][pq[1]], pq[0] * meta.width + pq[1]))
    entries = [QueryEntry(p, q, count=G[p][q]) for p, q in ranked[:k]]
    return QueryResult("topk-handoffs", entries, k=k, reveal_count=2 * k)


def plain_topk_bottlenecks(G, W, k: int, meta: PublicMetadata,
                           span_bound: int | None = None) -> QueryResult:
    check_magnitude_guard(meta, span_bound if span_bound is not None else DEFAULT_SPAN_BOUND)
    true_w = meta.m_a + meta.m_b
    domain = [(p, q) for p in range(true_w) for q in range(true_w)]
    if k > len(domain):
        raise ValueError(f"k={k} exceeds the {len(domain)} real cells")

    def better(e1, e2):
        (p1, q1), (p2, q2) = e1, e2
        c1, d1 = G[p1][q1], W[p1][q1]
        c2, d2 = G[p2][q2], W[p2][q2]
        if (c1 > 0) != (c2 > 0):
            return -1 if c1 > 0 else 1
        if c1 > 0:
            # cross-multiplication: d1/c1 > d2/c2  <=>  d1*c2 > d2*c1
            lhs, rhs = d1 * c2, d2 * c1
            if lhs != rhs:
                return -1 if lhs > rhs else 1
        lin1, lin2 = p1 * meta.width + q1, p2 * meta.width + q2
        return -1 if lin1 < lin2 else 1

    ranked = sorted(domain, key=cmp_to_key(better))
    entries = [QueryEntry(p, q, count=G[p][q], total_seconds=W[p][q])
               for p, q in ranked[:k]]
    return QueryResult("topk-bottlenecks", entries, k=k, reveal_count=3 * k)


def plain_cell(G, W, p: int, q: int, meta: PublicMetadata) -> QueryResult:
    true_w = meta.m_a + meta.m_b
    if not (0 <= p < true_w and 0 <= q < true_w):
        raise ValueError(f"cell ({p},{q}) is outside the real activity range")
    return QueryResult("cell", [QueryEntry(p, q, count=G[p][q], total_seconds=W[p][q])],
                       reveal_count=2)


def plain_handoff_wait(G, W, p: int, q: int, meta: PublicMetadata) -> QueryResult:
    if (p, q) not in handoff_domain(meta):
        raise ValueError(f"cell ({p},{q}) is not a hand-off between the parties")
    cnt = G[p][q]
    entry = QueryEntry(p, q, count=cnt, total_seconds=W[p][q] if cnt else 0)
    return QueryResult("handoff-wait", [entry], reveal_count=2)
