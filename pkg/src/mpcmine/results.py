"""Query result containers and public domain derivations.

Shared by the secure query layer and the plaintext reference; everything
here is computable from public metadata and opened outputs, so importing
it pulls in no protocol code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .events import PublicMetadata


class QueryError(ValueError):
    pass


class MagnitudeGuardError(QueryError):
    pass


DEFAULT_SPAN_BOUND = 1 << 32  # declared upper bound on any event-pair gap, seconds


@dataclass(frozen=True)
class QueryEntry:
    """One answered cell.  count and total_seconds are exact integers; the
    mean is a float convenience derived from them."""

    source: int
    target: int
    count: int | None = None
    total_seconds: int | None = None

    @property
    def mean_seconds(self) -> float | None:
        if self.count and self.total_seconds is not None:
            return self.total_seconds / self.count
        return None


@dataclass
class QueryResult:
    query: str
    entries: list
    k: int | None = None
    reveal_count: int = 0

    def to_json(self) -> dict:
        return {
            "query": self.query,
            "k": self.k,
            "results": [
                {
                    "from": e.source,
                    "to": e.target,
                    "count": e.count,
                    "total_seconds": e.total_seconds,
                    "mean_seconds": e.mean_seconds,
                }
                for e in self.entries
            ],
            "reveals": self.reveal_count,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def handoff_domain(meta: PublicMetadata) -> list[tuple[int, int]]:
    """Cells whose two activities belong to different parties, by linear index."""
    a = range(0, meta.m_a)
    b = range(meta.m_a, meta.m_a + meta.m_b)
    cells = [(p, q) for p in a for q in b] + [(p, q) for p in b for q in a]
    cells.sort(key=lambda pq: pq[0] * meta.width + pq[1])
    return cells


def check_magnitude_guard(meta: PublicMetadata, span_bound: int = DEFAULT_SPAN_BOUND) -> None:
    """Public pre-flight for the division-free ranking.

    pairs is an upper bound on how many adjacent pairs any cell can absorb;
    the third condition keeps every cross-product below 2^63 so the shared
    comparison stays valid.
    """
    pairs = 2 * meta.trace_count * meta.l_max
    if pairs >= 2**31:
        raise MagnitudeGuardError(f"pair bound {pairs} >= 2^31")
    if span_bound * pairs >= 2**62:
        raise MagnitudeGuardError(f"span*pairs {span_bound * pairs} >= 2^62")
    if span_bound * pairs * pairs >= 2**63:
        raise MagnitudeGuardError(f"span*pairs^2 {span_bound * pairs * pairs} >= 2^63")
