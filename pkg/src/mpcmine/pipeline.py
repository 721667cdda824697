"""End-to-end runs: split, prepare, share, sort, accumulate, query, report.

The `secure` backend drives the three-party engine; the `clear` backend
answers the same queries from the plaintext reference, which is how the
central equivalence checks are phrased: both backends must emit identical
query JSON for the same inputs and seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import oracle, queries
from .dfg import build_dfg, reveal_dfg
from .events import (ActivityDictionary, PublicMetadata, build_dictionary, prepare)
from .network import ThreePartyNetwork
from .protocols import SecureEngine
from .queries import DEFAULT_SPAN_BOUND, QueryResult


class ConfigError(ValueError):
    pass


@dataclass
class QuerySpec:
    kind: str = "topk-handoffs"  # topk-handoffs | topk-bottlenecks | cell | handoff-wait
    k: int = 3
    source: int | None = None
    target: int | None = None

    def validate(self) -> None:
        kinds = ("topk-handoffs", "topk-bottlenecks", "cell", "handoff-wait")
        if self.kind not in kinds:
            raise ConfigError(f"query must be one of {kinds}, got {self.kind!r}")
        if self.kind in ("cell", "handoff-wait") and (self.source is None or self.target is None):
            raise ConfigError(f"query {self.kind!r} needs source and target cell indices")
        if self.kind.startswith("topk") and self.k < 1:
            raise ConfigError("k must be >= 1")


@dataclass
class RunConfig:
    chunk_count: int = 1
    pad_activities: int = 0
    backend: str = "secure"
    seed: int = 0
    l_max: int | None = None  # override to inflate trace padding
    query: QuerySpec = field(default_factory=QuerySpec)
    unsafe_reveal_dfg: bool = False
    span_bound: int = DEFAULT_SPAN_BOUND
    label: str = "log"

    def validate(self) -> None:
        if self.backend not in ("secure", "clear"):
            raise ConfigError(f"backend must be secure or clear, got {self.backend!r}")
        if self.chunk_count < 1:
            raise ConfigError("chunk count must be >= 1")
        if self.pad_activities < 0:
            raise ConfigError("activity padding cannot be negative")
        self.query.validate()


@dataclass
class BenchReport:
    label: str
    backend: str
    chunk_count: int
    trace_count: int
    width: int
    l_max: int
    event_count: int
    wall_seconds: dict
    throughput_eps: float
    phases: dict
    comparators: int
    reveals: int

    def to_json(self) -> dict:
        return {
            "log": self.label,
            "backend": self.backend,
            "chunk_count": self.chunk_count,
            "trace_count": self.trace_count,
            "width": self.width,
            "l_max": self.l_max,
            "event_count": self.event_count,
            "wall_seconds": self.wall_seconds,
            "throughput_events_per_second": self.throughput_eps,
            "phases": self.phases,
            "comparators": self.comparators,
            "reveals": self.reveals,
        }


@dataclass
class RunResult:
    query_result: QueryResult
    report: BenchReport
    metadata: PublicMetadata
    dictionary_a: ActivityDictionary
    dictionary_b: ActivityDictionary
    dfg_dump: dict | None = None


def split_round_robin(events):
    """Assign activities alternately (sorted by name) to parties A and B."""
    names = sorted({e.activity for e in events})
    party_a = set(names[0::2])
    a = [e for e in events if e.activity in party_a]
    b = [e for e in events if e.activity not in party_a]
    return a, b


def public_setup(events_a, events_b, chunk_count: int, pad_activities: int = 0,
                 l_max: int | None = None):
    """Derive the jointly known structure: dictionaries, case order, metadata."""
    names_a = sorted({e.activity for e in events_a})
    names_b = sorted({e.activity for e in events_b})
    overlap = set(names_a) & set(names_b)
    if overlap:
        raise ConfigError(f"activities executed by both parties: {sorted(overlap)}")
    if not names_a and not names_b:
        raise ConfigError("both logs are empty: nothing to analyze")
    width = len(names_a) + len(names_b) + pad_activities
    dict_a = build_dictionary(names_a, 0, width)
    dict_b = build_dictionary(names_b, len(names_a), width)
    case_order = sorted({e.case_id for e in events_a} | {e.case_id for e in events_b})

    def local_max(events):
        lens: dict = {}
        for e in events:
            lens[e.case_id] = lens.get(e.case_id, 0) + 1
        return max(lens.values(), default=0)

    natural = max(local_max(events_a), local_max(events_b), 1)
    if l_max is None:
        l_max = natural
    elif l_max < natural:
        raise ConfigError(f"l_max override {l_max} below longest trace {natural}")
    meta = PublicMetadata(m_a=len(names_a), m_b=len(names_b), l_max=l_max,
                          trace_count=len(case_order), chunk_count=chunk_count,
                          width=width)
    return dict_a, dict_b, case_order, meta


def _run_query_secure(engine, dfg, meta, spec: QuerySpec, span_bound: int) -> QueryResult:
    if spec.kind == "topk-handoffs":
        return queries.topk_handoffs(engine, dfg, spec.k, meta)
    if spec.kind == "topk-bottlenecks":
        return queries.topk_bottlenecks(engine, dfg, spec.k, meta, span_bound)
    if spec.kind == "cell":
        return queries.cell_query(engine, dfg, spec.source, spec.target, meta)
    return queries.handoff_waiting_time(engine, dfg, spec.source, spec.target, meta)


def _run_query_clear(G, W, meta, spec: QuerySpec, span_bound: int) -> QueryResult:
    if spec.kind == "topk-handoffs":
        return oracle.plain_topk_handoffs(G, spec.k, meta)
    if spec.kind == "topk-bottlenecks":
        return oracle.plain_topk_bottlenecks(G, W, spec.k, meta, span_bound)
    if spec.kind == "cell":
        return oracle.plain_cell(G, W, spec.source, spec.target, meta)
    return oracle.plain_handoff_wait(G, W, spec.source, spec.target, meta)


def run_pipeline(events_a, events_b, config: RunConfig) -> RunResult:
    config.validate()
    dict_a, dict_b, case_order, meta = public_setup(
        events_a, events_b, config.chunk_count, config.pad_activities, config.l_max)

    if config.backend == "clear":
        return _run_clear(events_a, events_b, config, dict_a, dict_b, meta)

    prep_a = prepare(events_a, dict_a, meta.l_max, case_order)
    prep_b = prepare(events_b, dict_b, meta.l_max, case_order)
    engine = SecureEngine(seed=config.seed, network=ThreePartyNetwork())

    shared_dfg, stats = build_dfg(engine, prep_a, prep_b, config.chunk_count)

    t0 = time.perf_counter()
    with engine.net.phase("query"):
        qr = _run_query_secure(engine, shared_dfg, meta, config.query, config.span_bound)
    query_seconds = time.perf_counter() - t0

    dump = None
    if config.unsafe_reveal_dfg:
        g, w = reveal_dfg(engine, shared_dfg)
        dump = {"width": meta.width, "G": g, "W": w}

    ledger = engine.net.snapshot_ledger()
    total = stats.sort_seconds + stats.dfg_seconds + query_seconds
    report = BenchReport(
        label=config.label,
        backend="secure",
        chunk_count=config.chunk_count,
        trace_count=meta.trace_count,
        width=meta.width,
        l_max=meta.l_max,
        event_count=stats.event_count,
        wall_seconds={"sort": stats.sort_seconds, "dfg": stats.dfg_seconds,
                      "query": query_seconds, "total": total},
        throughput_eps=stats.event_count / total if total > 0 else 0.0,
        phases=ledger.to_json()["phases"],
        comparators=engine.op_counts.get("comparators", 0),
        reveals=qr.reveal_count,
    )
    return RunResult(qr, report, meta, dict_a, dict_b, dump)


def _run_clear(events_a, events_b, config, dict_a, dict_b, meta) -> RunResult:
    index_of = {name: dict_a.index_of(name) for name in dict_a.local_names}
    index_of.update({name: dict_b.index_of(name) for name in dict_b.local_names})
    t0 = time.perf_counter()
    G, W = oracle.plain_dfg(events_a, events_b, index_of, meta.width)
    dfg_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    qr = _run_query_clear(G, W, meta, config.query, config.span_bound)
    query_seconds = time.perf_counter() - t0
    dump = {"width": meta.width, "G": G, "W": W} if config.unsafe_reveal_dfg else None
    total = dfg_seconds + query_seconds
    events = len(events_a) + len(events_b)
    report = BenchReport(
        label=config.label,
        backend="clear",
        chunk_count=config.chunk_count,
        trace_count=meta.trace_count,
        width=meta.width,
        l_max=meta.l_max,
        event_count=events,
        wall_seconds={"sort": 0.0, "dfg": dfg_seconds, "query": query_seconds,
                      "total": total},
        throughput_eps=events / total if total > 0 else 0.0,
        phases={},
        comparators=0,
        reveals=qr.reveal_count,
    )
    return RunResult(qr, report, meta, dict_a, dict_b, dump)
