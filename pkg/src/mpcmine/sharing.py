"""64-bit ring values under 2-out-of-3 replicated secret sharing.

A secret x is split into three summands c0 + c1 + c2 = x (mod 2^64) and
party i holds the pair (c_i, c_{i+1 mod 3}).  Any two parties can
reconstruct; a single party's pair is uniform and independent of x.
Vectors are stored column-wise as numpy uint64 arrays so protocol code
can run the same instruction over every lane at once.

A parallel container holds XOR sharings (c0 ^ c1 ^ c2 = x) used by the
Boolean sub-protocols; the two must never be mixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

RING_BITS = 64
MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)

_next_sid = 0

# Test hook: every lane opened through reconstruct() is counted here.  The
# query layer's reveal budget is asserted against deltas of this counter.
_reveal_counter = 0


class IntegrityError(ValueError):
    """Raised when two party views do not belong to one consistent sharing."""


class LengthMismatchError(ValueError):
    pass


def reveal_count() -> int:
    return _reveal_counter


def reset_reveal_count() -> None:
    global _reveal_counter
    _reveal_counter = 0


def _fresh_sid() -> int:
    global _next_sid
    _next_sid += 1
    return _next_sid


def as_ring(values) -> np.ndarray:
    """Coerce ints / sequences to a uint64 ring vector (wrapping mod 2^64)."""
    arr = np.asarray(values)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.dtype != np.uint64:
        arr = np.asarray([int(v) & 0xFFFFFFFFFFFFFFFF for v in arr.tolist()], dtype=np.uint64)
    return arr


def random_ring(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2**64, size=n, dtype=np.uint64)


@dataclass(frozen=True)
class PartyView:
    """What a single party holds of one sharing: its pair of components."""

    party: int
    sid: int
    a: np.ndarray  # c_party
    b: np.ndarray  # c_{party+1 mod 3}


class _ReplicatedBase:
    """Common container: the three summand arrays of one sharing.

    The simulator keeps all three components in one object; protocol code
    is written so that party i's messages depend only on view(i) plus its
    own randomness.
    """

    __slots__ = ("comps", "sid")

    def __init__(self, comps: Sequence[np.ndarray], sid: int | None = None):
        c0, c1, c2 = comps
        if not (len(c0) == len(c1) == len(c2)):
            raise LengthMismatchError("sharing components differ in length")
        self.comps = (
            np.ascontiguousarray(c0, dtype=np.uint64),
            np.ascontiguousarray(c1, dtype=np.uint64),
            np.ascontiguousarray(c2, dtype=np.uint64),
        )
        self.sid = _fresh_sid() if sid is None else sid

    def __len__(self) -> int:
        return len(self.comps[0])

    def view(self, party: int) -> PartyView:
        if party not in (0, 1, 2):
            raise ValueError(f"no such party: {party}")
        return PartyView(party, self.sid, self.comps[party], self.comps[(party + 1) % 3])

    def take(self, idx):
        """Row gather; public index arrays only (comparator positions are public)."""
        return type(self)([c[idx] for c in self.comps])

    def slice(self, start: int, stop: int):
        return type(self)([c[start:stop] for c in self.comps])

    @classmethod
    def concat(cls, parts: Iterable["_ReplicatedBase"]):
        parts = list(parts)
        return cls([np.concatenate([p.comps[i] for p in parts]) for i in range(3)])

    def split(self, sizes: Sequence[int]):
        out, off = [], 0
        for s in sizes:
            out.append(self.slice(off, off + s))
            off += s
        if off != len(self):
            raise LengthMismatchError("split sizes do not cover the vector")
        return out


class SharedVector(_ReplicatedBase):
    """Arithmetic sharing: c0 + c1 + c2 = secret (mod 2^64)."""

    @classmethod
    def share(cls, values, rng: np.random.Generator) -> "SharedVector":
        values = as_ring(values)
        c0 = random_ring(rng, len(values))
        c1 = random_ring(rng, len(values))
        c2 = values - c0 - c1
        return cls((c0, c1, c2))

    @classmethod
    def public(cls, values) -> "SharedVector":
        """Deterministic sharing of publicly known values: (v, 0, 0)."""
        values = as_ring(values)
        # separate zero buffers: sorting scatters into components in place
        return cls((values.copy(), np.zeros(len(values), dtype=np.uint64),
                    np.zeros(len(values), dtype=np.uint64)))

    @classmethod
    def zeros(cls, n: int) -> "SharedVector":
        z = np.zeros(n, dtype=np.uint64)
        return cls((z, z.copy(), z.copy()))

    def __add__(self, other: "SharedVector") -> "SharedVector":
        self._check(other)
        return SharedVector([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "SharedVector") -> "SharedVector":
        self._check(other)
        return SharedVector([a - b for a, b in zip(self.comps, other.comps)])

    def add_public(self, values) -> "SharedVector":
        values = as_ring(values)
        if len(values) == 1 and len(self) != 1:
            values = np.full(len(self), values[0], dtype=np.uint64)
        return SharedVector((self.comps[0] + values, self.comps[1], self.comps[2]))

    def scale_public(self, k) -> "SharedVector":
        k = np.uint64(int(k) & 0xFFFFFFFFFFFFFFFF)
        return SharedVector([c * k for c in self.comps])

    def neg(self) -> "SharedVector":
        return SharedVector([np.zeros(len(self), dtype=np.uint64) - c for c in self.comps])

    def sum_groups(self, groups: int) -> "SharedVector":
        """Local sum of equal-sized contiguous lane groups (share-wise, wraps)."""
        n = len(self)
        if groups <= 0 or n % groups:
            raise LengthMismatchError(f"cannot sum {n} lanes into {groups} groups")
        return SharedVector([c.reshape(groups, n // groups).sum(axis=1, dtype=np.uint64)
                             for c in self.comps])

    def _check(self, other):
        if not isinstance(other, SharedVector):
            raise TypeError("arithmetic sharing required")
        if len(self) != len(other):
            raise LengthMismatchError(f"operand lengths differ: {len(self)} vs {len(other)}")


class SharedWords(_ReplicatedBase):
    """Boolean sharing of 64-bit words: c0 ^ c1 ^ c2 = secret."""

    @classmethod
    def public(cls, values) -> "SharedWords":
        values = as_ring(values)
        return cls((values.copy(), np.zeros(len(values), dtype=np.uint64),
                    np.zeros(len(values), dtype=np.uint64)))

    def __xor__(self, other: "SharedWords") -> "SharedWords":
        if len(self) != len(other):
            raise LengthMismatchError(f"operand lengths differ: {len(self)} vs {len(other)}")
        return SharedWords([a ^ b for a, b in zip(self.comps, other.comps)])

    def xor_public(self, mask) -> "SharedWords":
        mask = np.uint64(int(mask) & 0xFFFFFFFFFFFFFFFF)
        return SharedWords((self.comps[0] ^ mask, self.comps[1], self.comps[2]))

    def invert(self) -> "SharedWords":
        return self.xor_public(MASK64)

    def and_public(self, mask) -> "SharedWords":
        mask = np.uint64(int(mask) & 0xFFFFFFFFFFFFFFFF)
        return SharedWords([c & mask for c in self.comps])

    def shift_left(self, d: int) -> "SharedWords":
        return SharedWords([c << np.uint64(d) for c in self.comps])

    def shift_right(self, d: int) -> "SharedWords":
        return SharedWords([c >> np.uint64(d) for c in self.comps])

    def bit(self, k: int) -> "SharedWords":
        """Extract bit k of every lane as a 0/1 word sharing (local)."""
        return self.shift_right(k).and_public(1)


def share(values, rng: np.random.Generator) -> SharedVector:
    return SharedVector.share(values, rng)


def reconstruct(view_a: PartyView, view_b: PartyView) -> np.ndarray:
    """Open a sharing from two distinct parties' views.

    The overlapping replicated component must agree between the views,
    otherwise the sharing is inconsistent and an IntegrityError is raised.
    Every opened lane is added to the module reveal counter.
    """
    global _reveal_counter
    if view_a.party == view_b.party:
        raise IntegrityError("views must come from two distinct parties")
    if view_a.sid != view_b.sid:
        raise IntegrityError(
            f"views belong to different sharings ({view_a.sid} vs {view_b.sid})")
    if len(view_a.a) != len(view_b.a):
        raise IntegrityError("views differ in length")
    # order the two views so that `second` follows `first` cyclically
    first, second = view_a, view_b
    if (first.party + 1) % 3 != second.party:
        first, second = second, first
    if (first.party + 1) % 3 == second.party:
        if not np.array_equal(first.b, second.a):
            raise IntegrityError("replicated components disagree between views")
        total = first.a + first.b + second.b
    else:
        raise IntegrityError("views are not from distinct parties of one sharing")
    _reveal_counter += len(total)
    return total


def reconstruct_words(view_a: PartyView, view_b: PartyView) -> np.ndarray:
    """XOR-domain variant of reconstruct (same integrity rules, same counting)."""
    global _reveal_counter
    if view_a.party == view_b.party:
        raise IntegrityError("views must come from two distinct parties")
    if view_a.sid != view_b.sid:
        raise IntegrityError("views belong to different sharings")
    first, second = view_a, view_b
    if (first.party + 1) % 3 != second.party:
        first, second = second, first
    if not np.array_equal(first.b, second.a):
        raise IntegrityError("replicated components disagree between views")
    total = first.a ^ first.b ^ second.b
    _reveal_counter += len(total)
    return total


def peek(shared: _ReplicatedBase) -> np.ndarray:
    """Test-only opening that bypasses the reveal counter.

    Never call this from protocol or query code; it exists so unit tests can
    compare against plaintext oracles without spending reveal budget.
    """
    c0, c1, c2 = shared.comps
    if isinstance(shared, SharedWords):
        return c0 ^ c1 ^ c2
    return c0 + c1 + c2
