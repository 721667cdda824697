"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class QueryModel(BaseModel):
    query: Literal["topk-handoffs", "topk-bottlenecks", "cell", "handoff-wait"] = "topk-handoffs"
    k: int = 3
    source: Optional[int] = None
    target: Optional[int] = None


class LogPayload(BaseModel):
    """Either both party logs inline, or one combined log to be split."""

    log_a_csv: Optional[str] = None
    log_b_csv: Optional[str] = None
    log_csv: Optional[str] = None
    split: Literal["round-robin"] = "round-robin"
    label: str = "log"


class RunRequest(LogPayload):
    chunks: int = 1
    pad_activities: int = 0
    backend: Literal["secure", "clear"] = "secure"
    seed: int = 0
    l_max: Optional[int] = None
    span_bound: Optional[int] = None
    query: QueryModel = Field(default_factory=QueryModel)
    unsafe_reveal_dfg: bool = False


class QueryEntryModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    source: int = Field(alias="from")
    target: int = Field(alias="to")
    count: Optional[int] = None
    total_seconds: Optional[int] = None
    mean_seconds: Optional[float] = None


class QueryResultModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    query: str
    k: Optional[int] = None
    results: list[QueryEntryModel]
    reveals: int


class MetadataModel(BaseModel):
    m_a: int
    m_b: int
    l_max: int
    trace_count: int
    chunk_count: int
    width: int


class RunResponse(BaseModel):
    query: QueryResultModel
    report: dict
    metadata: MetadataModel
    dictionary_a: dict
    dictionary_b: dict
    dfg: Optional[dict] = None


class SweepRequest(LogPayload):
    chunk_counts: list[int] = Field(default_factory=lambda: [1, 2, 4, 8])
    repetitions: int = 1
    pad_activities: int = 0
    backend: Literal["secure", "clear"] = "secure"
    seed: int = 0
    query: QueryModel = Field(default_factory=QueryModel)


class SweepResponse(BaseModel):
    rows: list[dict]
    csv: str


class SessionCreateRequest(LogPayload):
    chunks: int = 1
    pad_activities: int = 0
    seed: int = 0
    l_max: Optional[int] = None


class SessionCreateResponse(BaseModel):
    session_id: str
    metadata: MetadataModel
    report: dict


class SessionQueryRequest(BaseModel):
    query: QueryModel = Field(default_factory=QueryModel)
    span_bound: Optional[int] = None


class LedgerResponse(BaseModel):
    session_id: str
    ledger: dict
    reveals: int
