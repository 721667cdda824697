"""Plaintext-side log handling done by each input party before sharing.

Covers CSV ingestion, the one-hot activity dictionary, trace padding and
local sorting, and the assignment of whole traces to processing chunks.
Everything here runs on a party's own data; the only values that ever
cross the party boundary in plaintext are the PublicMetadata fields.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

# Dummy rows carry this timestamp: above every legal timestamp, and small
# enough that any pairwise difference stays below 2^63 as the comparison
# protocol requires.
DUMMY_TS = 1 << 62
MAX_TIMESTAMP = 1 << 62  # exclusive upper bound for real events
DUMMY_ACT = -1


class LogFormatError(ValueError):
    pass


class TimestampRangeError(ValueError):
    pass


@dataclass(frozen=True)
class RawEvent:
    case_id: str
    activity: str
    timestamp: int  # unsigned seconds since epoch


@dataclass(frozen=True)
class ActivityDictionary:
    """One party's slice of the global one-hot index space.

    Local names get consecutive indices starting at party_offset, in
    sorted name order, so both parties can agree on the layout from
    counts alone; names never leave the party.
    """

    party_offset: int
    local_names: tuple
    global_width: int

    def __post_init__(self):
        if len(set(self.local_names)) != len(self.local_names):
            dupes = sorted({n for n in self.local_names if list(self.local_names).count(n) > 1})
            raise LogFormatError(f"duplicate activity names: {dupes}")
        if list(self.local_names) != sorted(self.local_names):
            object.__setattr__(self, "local_names", tuple(sorted(self.local_names)))
        if self.party_offset + len(self.local_names) > self.global_width:
            raise LogFormatError(
                f"{len(self.local_names)} activities at offset {self.party_offset} "
                f"do not fit in width {self.global_width}")

    def index_of(self, name: str) -> int:
        try:
            return self.party_offset + self.local_names.index(name)
        except ValueError:
            raise LogFormatError(f"unknown activity: {name!r}") from None

    def name_of(self, index: int) -> str:
        local = index - self.party_offset
        if not 0 <= local < len(self.local_names):
            raise LogFormatError(f"index {index} is not held by this party")
        return self.local_names[local]

    def to_json(self) -> dict:
        return {
            "party_offset": self.party_offset,
            "local_names": list(self.local_names),
            "global_width": self.global_width,
        }


@dataclass
class PreparedLog:
    """Padded, encoded, locally sorted rows ready for secret sharing.

    Stored column-wise: one row is (trace_index, activity index, timestamp)
    where activity index -1 marks a dummy row (all-zero one-hot).  Every
    trace contributes exactly l_max rows, grouped by trace and sorted by
    timestamp within the trace (stable, so ties keep ingestion order).
    """

    trace_index: np.ndarray
    act_index: np.ndarray
    timestamp: np.ndarray
    l_max: int
    trace_count: int
    width: int
    case_order: tuple = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.trace_index)

    def event_count(self) -> int:
        return int((self.act_index >= 0).sum())

    def onehot_column(self, position: int) -> np.ndarray:
        return (self.act_index == position).astype(np.uint64)

    def rows(self):
        for t, a, ts in zip(self.trace_index, self.act_index, self.timestamp):
            onehot = [0] * self.width
            if a >= 0:
                onehot[a] = 1
            yield int(t), tuple(onehot), int(ts)


@dataclass(frozen=True)
class PublicMetadata:
    """The only plaintext values the parties exchange about their logs."""

    m_a: int
    m_b: int
    l_max: int
    trace_count: int
    chunk_count: int
    width: int  # one-hot width incl. decoy padding; derived from public flags

    def to_json(self) -> dict:
        return {
            "m_a": self.m_a,
            "m_b": self.m_b,
            "l_max": self.l_max,
            "trace_count": self.trace_count,
            "chunk_count": self.chunk_count,
            "width": self.width,
        }


def _parse_timestamp(text: str, line_no: int) -> int:
    text = text.strip()
    try:
        value = int(text)
    except ValueError:
        iso = text.replace("Z", "+00:00") if text.endswith("Z") else text
        try:
            dt = datetime.fromisoformat(iso)
        except ValueError:
            raise LogFormatError(f"line {line_no}: bad timestamp {text!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        value = int(dt.timestamp())
    if value < 0:
        raise TimestampRangeError(f"line {line_no}: negative timestamp {value}")
    if value >= MAX_TIMESTAMP:
        raise TimestampRangeError(f"line {line_no}: timestamp {value} >= 2^62")
    return value


def parse_csv(data) -> list[RawEvent]:
    """Parse `case_id,activity,timestamp` CSV into events, in file order.

    Timestamps may be integer epoch seconds or ISO-8601; naive datetimes
    are taken as UTC.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.reader(io.StringIO(data))
    try:
        header = next(reader)
    except StopIteration:
        raise LogFormatError("empty input: missing header") from None
    expected = ["case_id", "activity", "timestamp"]
    if [h.strip().lower() for h in header] != expected:
        raise LogFormatError(f"line 1: header must be {','.join(expected)}")
    events = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise LogFormatError(f"line {line_no}: expected 3 fields, got {len(row)}")
        case_id, activity = row[0].strip(), row[1].strip()
        if not case_id or not activity:
            raise LogFormatError(f"line {line_no}: empty case id or activity")
        events.append(RawEvent(case_id, activity, _parse_timestamp(row[2], line_no)))
    return events


def build_dictionary(local_activities, party_offset: int, global_width: int) -> ActivityDictionary:
    return ActivityDictionary(party_offset, tuple(local_activities), global_width)


def prepare(events, dictionary: ActivityDictionary, l_max: int,
            case_order=None) -> PreparedLog:
    """Encode, pad and locally sort one party's events.

    Trace indices follow the canonical lexicographically sorted case-id
    order (agreed by both parties); pass case_order to pin the joint
    universe when the other party serves cases this log never mentions.
    """
    if case_order is None:
        case_order = sorted({e.case_id for e in events})
    case_order = list(case_order)
    rank = {c: i for i, c in enumerate(case_order)}
    per_trace: dict[int, list] = {i: [] for i in range(len(case_order))}
    for e in events:
        if e.case_id not in rank:
            raise LogFormatError(f"case {e.case_id!r} missing from the agreed case order")
        per_trace[rank[e.case_id]].append(e)
    longest = max((len(v) for v in per_trace.values()), default=0)
    if longest > l_max:
        raise LogFormatError(f"trace of length {longest} exceeds l_max={l_max}")

    trace_col, act_col, ts_col = [], [], []
    for t in range(len(case_order)):
        ordered = sorted(per_trace[t], key=lambda e: e.timestamp)  # stable on ties
        for e in ordered:
            trace_col.append(t)
            act_col.append(dictionary.index_of(e.activity))
            ts_col.append(e.timestamp)
        for _ in range(l_max - len(ordered)):
            trace_col.append(t)
            act_col.append(DUMMY_ACT)
            ts_col.append(DUMMY_TS)
    return PreparedLog(
        trace_index=np.asarray(trace_col, dtype=np.uint64),
        act_index=np.asarray(act_col, dtype=np.int64),
        timestamp=np.asarray(ts_col, dtype=np.uint64),
        l_max=l_max,
        trace_count=len(case_order),
        width=dictionary.global_width,
        case_order=tuple(case_order),
    )


def assign_chunks(prepared: PreparedLog, chunk_count: int) -> list[PreparedLog]:
    """Partition whole traces into chunks: trace t goes to chunk t mod c.

    Short chunks are topped up with all-dummy traces (fresh indices past
    the real trace count) so every chunk holds the same number of row
    slots; both parties derive identical dummy indices from the counts.
    """
    if chunk_count < 1:
        raise ValueError("chunk_count must be >= 1")
    T, L = prepared.trace_count, prepared.l_max
    per_chunk = math.ceil(T / chunk_count) if T else 0
    chunks = []
    next_dummy = T
    trace_of_row = prepared.trace_index
    for c in range(chunk_count):
        members = [t for t in range(c, T, chunk_count)]
        sel = np.isin(trace_of_row, np.asarray(members, dtype=np.uint64))
        trace_col = list(prepared.trace_index[sel])
        act_col = list(prepared.act_index[sel])
        ts_col = list(prepared.timestamp[sel])
        for _ in range(per_chunk - len(members)):
            trace_col.extend([next_dummy] * L)
            act_col.extend([DUMMY_ACT] * L)
            ts_col.extend([DUMMY_TS] * L)
            next_dummy += 1
        chunks.append(PreparedLog(
            trace_index=np.asarray(trace_col, dtype=np.uint64),
            act_index=np.asarray(act_col, dtype=np.int64),
            timestamp=np.asarray(ts_col, dtype=np.uint64),
            l_max=L,
            trace_count=per_chunk,
            width=prepared.width,
            case_order=prepared.case_order,
        ))
    return chunks


def metadata_json(meta: PublicMetadata, dictionary: ActivityDictionary) -> str:
    return json.dumps({"metadata": meta.to_json(), "dictionary": dictionary.to_json()},
                      indent=2)
