"""Simulated three-node network with synchronous rounds and traffic metering.

The protocol scheduler calls exchange() once per round with every party's
outbox; all messages are delivered atomically and the ledger is updated
inside that barrier.  The model is deliberately synchronous (BSP-style)
so round counts are exact and transcripts are reproducible.  Payloads may
be bytes or numpy arrays; only their byte length matters for accounting.
"""

from __future__ import annotations

import csv
import io
import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

PARTIES = (0, 1, 2)


class NetworkError(ValueError):
    pass


def _nbytes(payload) -> int:
    if isinstance(payload, np.ndarray):
        return payload.nbytes
    if isinstance(payload, (bytes, bytearray, memoryview)):
        return len(payload)
    raise NetworkError(f"unsupported payload type: {type(payload).__name__}")


@dataclass
class PhaseTotals:
    rounds: int = 0
    pair_bytes: dict = field(default_factory=dict)  # (sender, receiver) -> bytes

    def total_bytes(self) -> int:
        return sum(self.pair_bytes.values())

    def bytes_sent_by(self, party: int) -> int:
        return sum(b for (s, _), b in self.pair_bytes.items() if s == party)

    def bytes_received_by(self, party: int) -> int:
        return sum(b for (_, r), b in self.pair_bytes.items() if r == party)

    def copy(self) -> "PhaseTotals":
        return PhaseTotals(self.rounds, dict(self.pair_bytes))


@dataclass
class TrafficLedger:
    """Per-party-pair byte counts and round counts, broken down by phase."""

    phases: dict = field(default_factory=dict)  # tag -> PhaseTotals

    def phase(self, tag: str) -> PhaseTotals:
        return self.phases.setdefault(tag, PhaseTotals())

    @property
    def round_count(self) -> int:
        return sum(p.rounds for p in self.phases.values())

    def total_bytes(self) -> int:
        return sum(p.total_bytes() for p in self.phases.values())

    def bytes_sent_by(self, party: int, tag: str | None = None) -> int:
        phases = [self.phases[tag]] if tag else self.phases.values()
        return sum(p.bytes_sent_by(party) for p in phases)

    def copy(self) -> "TrafficLedger":
        return TrafficLedger({tag: p.copy() for tag, p in self.phases.items()})

    def to_json(self) -> dict:
        return {
            "round_count": self.round_count,
            "total_bytes": self.total_bytes(),
            "phases": {
                tag: {
                    "rounds": p.rounds,
                    "total_bytes": p.total_bytes(),
                    "bytes_sent_per_party": [p.bytes_sent_by(i) for i in PARTIES],
                    "pairs": {f"{s}->{r}": b for (s, r), b in sorted(p.pair_bytes.items())},
                }
                for tag, p in self.phases.items()
            },
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["phase", "pair", "bytes", "rounds"])
        for tag, p in self.phases.items():
            for (s, r), b in sorted(p.pair_bytes.items()):
                w.writerow([tag, f"{s}->{r}", b, p.rounds])
        return buf.getvalue()


@dataclass(frozen=True)
class TranscriptEntry:
    round: int
    sender: int
    receiver: int
    length: int
    phase: str


class ThreePartyNetwork:
    """Message delivery plus byte/round accounting for the three compute nodes."""

    def __init__(self, capture_payloads: bool = False):
        self.ledger = TrafficLedger()
        self.transcript: list[TranscriptEntry] = []
        self.captured: list[tuple[TranscriptEntry, bytes]] = []
        self.capture_payloads = capture_payloads
        self._round = 0
        self._phase = "setup"

    @property
    def rounds(self) -> int:
        return self._round

    def set_phase(self, tag: str) -> None:
        self._phase = tag

    @contextmanager
    def phase(self, tag: str):
        prev = self._phase
        self._phase = tag
        try:
            yield self
        finally:
            self._phase = prev

    def exchange(self, outboxes: Sequence[Mapping[int, object]]) -> list[dict[int, object]]:
        """Deliver one synchronous round of messages.

        outboxes[i] maps receiver id -> payload for party i's outgoing
        messages.  Returns inboxes[i] mapping sender id -> payload.
        """
        if len(outboxes) != 3:
            raise NetworkError("exactly three outboxes required")
        self._round += 1
        totals = self.ledger.phase(self._phase)
        totals.rounds += 1
        inboxes: list[dict[int, object]] = [{}, {}, {}]
        for sender in PARTIES:
            for receiver, payload in outboxes[sender].items():
                if receiver == sender:
                    raise NetworkError(f"party {sender} addressed a message to itself")
                if receiver not in PARTIES:
                    raise NetworkError(f"no such party: {receiver}")
                size = _nbytes(payload)
                key = (sender, receiver)
                totals.pair_bytes[key] = totals.pair_bytes.get(key, 0) + size
                entry = TranscriptEntry(self._round, sender, receiver, size, self._phase)
                self.transcript.append(entry)
                if self.capture_payloads:
                    raw = payload.tobytes() if isinstance(payload, np.ndarray) else bytes(payload)
                    self.captured.append((entry, raw))
                inboxes[receiver][sender] = payload
        return inboxes

    def snapshot_ledger(self) -> TrafficLedger:
        return self.ledger.copy()

    def transcript_shape(self) -> list[tuple[int, int, int, int, str]]:
        """The observable surface: (round, sender, receiver, length, phase)."""
        return [(e.round, e.sender, e.receiver, e.length, e.phase) for e in self.transcript]

    def ledger_json(self) -> str:
        return json.dumps(self.ledger.to_json(), indent=2)
