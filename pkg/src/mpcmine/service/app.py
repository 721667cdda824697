"""FastAPI service around the engine.

Two usage styles: one-shot pipeline runs (POST /pipeline/run, which the
CLI wraps), and sessions that hold a secret-shared DFG in memory so a
sequence of queries can be answered against one expensive build, with the
reveal budget and traffic ledger observable per session.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException

from .. import queries as query_layer
from ..bench import bench_sweep, sweep_csv
from ..dfg import MetadataMismatchError, build_dfg
from ..events import LogFormatError, TimestampRangeError, parse_csv, prepare
from ..pipeline import (ConfigError, QuerySpec, RunConfig, public_setup,
                        run_pipeline, split_round_robin)
from ..protocols import SecureEngine, cost_table
from ..queries import DEFAULT_SPAN_BOUND, QueryError
from .schemas import (LedgerResponse, LogPayload, MetadataModel, QueryModel,
                      QueryResultModel, RunRequest, RunResponse,
                      SessionCreateRequest, SessionCreateResponse,
                      SessionQueryRequest, SweepRequest, SweepResponse)

_CLIENT_ERRORS = (ConfigError, LogFormatError, TimestampRangeError, QueryError,
                  MetadataMismatchError, ValueError)


@dataclass
class Session:
    engine: SecureEngine
    dfg: object
    metadata: object
    reveals: int = 0


def _load_events(payload: LogPayload):
    if payload.log_csv is not None:
        if payload.log_a_csv or payload.log_b_csv:
            raise ConfigError("give either one combined log or two party logs, not both")
        return split_round_robin(parse_csv(payload.log_csv))
    if payload.log_a_csv is None or payload.log_b_csv is None:
        raise ConfigError("both party logs are required unless a combined log is split")
    return parse_csv(payload.log_a_csv), parse_csv(payload.log_b_csv)


def _query_spec(model: QueryModel) -> QuerySpec:
    return QuerySpec(kind=model.query, k=model.k, source=model.source, target=model.target)


def create_app() -> FastAPI:
    app = FastAPI(title="mpcmine", version="0.1.0")
    sessions: dict[str, Session] = {}

    def fail(exc: Exception):
        raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/costs")
    def costs():
        return {"probe_length": 64, "primitives": cost_table()}

    @app.post("/pipeline/run", response_model=RunResponse)
    def pipeline_run(req: RunRequest):
        try:
            events_a, events_b = _load_events(req)
            config = RunConfig(
                chunk_count=req.chunks,
                pad_activities=req.pad_activities,
                backend=req.backend,
                seed=req.seed,
                l_max=req.l_max,
                query=_query_spec(req.query),
                unsafe_reveal_dfg=req.unsafe_reveal_dfg,
                span_bound=req.span_bound or DEFAULT_SPAN_BOUND,
                label=req.label,
            )
            result = run_pipeline(events_a, events_b, config)
        except _CLIENT_ERRORS as exc:
            fail(exc)
        return RunResponse(
            query=QueryResultModel.model_validate(result.query_result.to_json()),
            report=result.report.to_json(),
            metadata=MetadataModel.model_validate(result.metadata.to_json()),
            dictionary_a=result.dictionary_a.to_json(),
            dictionary_b=result.dictionary_b.to_json(),
            dfg=result.dfg_dump,
        )

    @app.post("/bench/sweep", response_model=SweepResponse)
    def bench(req: SweepRequest):
        try:
            events_a, events_b = _load_events(req)
            config = RunConfig(
                pad_activities=req.pad_activities,
                backend=req.backend,
                seed=req.seed,
                query=_query_spec(req.query),
                label=req.label,
            )
            rows = bench_sweep(events_a, events_b, config, req.chunk_counts,
                               req.repetitions)
        except _CLIENT_ERRORS as exc:
            fail(exc)
        return SweepResponse(rows=rows, csv=sweep_csv(rows))

    @app.post("/sessions", response_model=SessionCreateResponse)
    def create_session(req: SessionCreateRequest):
        try:
            events_a, events_b = _load_events(req)
            dict_a, dict_b, case_order, meta = public_setup(
                events_a, events_b, req.chunks, req.pad_activities, req.l_max)
            prep_a = prepare(events_a, dict_a, meta.l_max, case_order)
            prep_b = prepare(events_b, dict_b, meta.l_max, case_order)
            engine = SecureEngine(seed=req.seed)
            t0 = time.perf_counter()
            shared_dfg, stats = build_dfg(engine, prep_a, prep_b, req.chunks)
            build_seconds = time.perf_counter() - t0
        except _CLIENT_ERRORS as exc:
            fail(exc)
        sid = uuid.uuid4().hex
        sessions[sid] = Session(engine=engine, dfg=shared_dfg, metadata=meta)
        return SessionCreateResponse(
            session_id=sid,
            metadata=MetadataModel.model_validate(meta.to_json()),
            report={
                "build_seconds": build_seconds,
                "sort_seconds": stats.sort_seconds,
                "dfg_seconds": stats.dfg_seconds,
                "event_count": stats.event_count,
                "ledger": engine.net.ledger.to_json(),
            },
        )

    def _session(sid: str) -> Session:
        if sid not in sessions:
            raise HTTPException(status_code=404, detail=f"no session {sid}")
        return sessions[sid]

    @app.post("/sessions/{sid}/query", response_model=QueryResultModel)
    def session_query(sid: str, req: SessionQueryRequest):
        sess = _session(sid)
        spec = _query_spec(req.query)
        try:
            spec.validate()
            with sess.engine.net.phase("query"):
                if spec.kind == "topk-handoffs":
                    qr = query_layer.topk_handoffs(sess.engine, sess.dfg, spec.k,
                                                   sess.metadata)
                elif spec.kind == "topk-bottlenecks":
                    qr = query_layer.topk_bottlenecks(
                        sess.engine, sess.dfg, spec.k, sess.metadata,
                        req.span_bound or DEFAULT_SPAN_BOUND)
                elif spec.kind == "cell":
                    qr = query_layer.cell_query(sess.engine, sess.dfg, spec.source,
                                                spec.target, sess.metadata)
                else:
                    qr = query_layer.handoff_waiting_time(
                        sess.engine, sess.dfg, spec.source, spec.target, sess.metadata)
        except _CLIENT_ERRORS as exc:
            fail(exc)
        sess.reveals += qr.reveal_count
        return QueryResultModel.model_validate(qr.to_json())

    @app.get("/sessions/{sid}/ledger", response_model=LedgerResponse)
    def session_ledger(sid: str):
        sess = _session(sid)
        return LedgerResponse(session_id=sid, ledger=sess.engine.net.ledger.to_json(),
                              reveals=sess.reveals)

    @app.delete("/sessions/{sid}")
    def session_delete(sid: str):
        _session(sid)
        del sessions[sid]
        return {"deleted": sid}

    return app


app = create_app()
