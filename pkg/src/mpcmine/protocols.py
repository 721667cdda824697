"""Secure computation primitives over replicated shares.

Every primitive has a fixed communication cost for a given input length:
multiplication-style operations cost one round and one ring element (8
bytes) per lane per party, and the comparison family is built from an
arithmetic-to-Boolean conversion (Kogge-Stone carry circuit over packed
64-bit words) plus a bit-injection back into the arithmetic domain.
Correlated randomness comes from PRG seeds shared by adjacent party
pairs; there is no trusted dealer.

Lane conventions: vectors are processed element-wise ("lanes"); callers
batch independent work into one call to keep round counts flat.
"""

from __future__ import annotations

import numpy as np

from .network import ThreePartyNetwork
from .sharing import (
    LengthMismatchError,
    SharedVector,
    SharedWords,
    random_ring,
    reconstruct,
)

WORD_BITS = 64
_FOLD_SHIFTS = (32, 16, 8, 4, 2, 1)
_PREFIX_SHIFTS = (1, 2, 4, 8, 16, 32)


class SharedMatrix:
    """Square secret-shared matrix stored as one row-major lane vector."""

    def __init__(self, vec: SharedVector, width: int):
        if len(vec) != width * width:
            raise LengthMismatchError(f"{len(vec)} lanes cannot form a {width}x{width} matrix")
        self.vec = vec
        self.width = width

    @classmethod
    def zeros(cls, width: int) -> "SharedMatrix":
        return cls(SharedVector.zeros(width * width), width)

    def __add__(self, other: "SharedMatrix") -> "SharedMatrix":
        if self.width != other.width:
            raise LengthMismatchError(f"matrix widths differ: {self.width} vs {other.width}")
        return SharedMatrix(self.vec + other.vec, self.width)

    def cell(self, p: int, q: int) -> SharedVector:
        idx = p * self.width + q
        return self.vec.slice(idx, idx + 1)


class SecureEngine:
    """Scheduler for the three simulated compute parties.

    Holds the pair-shared PRG streams, the network (for metering), and an
    input RNG used when plaintext holders secret-share their columns.
    """

    def __init__(self, seed: int = 0, network: ThreePartyNetwork | None = None):
        ss = np.random.SeedSequence(seed)
        pair_seed, input_seed = ss.spawn(2)
        # one stream per adjacent pair (i, i+1); both holders read it in lockstep
        self._pair_rng = [np.random.default_rng(s) for s in pair_seed.spawn(3)]
        self.input_rng = np.random.default_rng(input_seed)
        self.net = network if network is not None else ThreePartyNetwork()
        self.op_counts: dict[str, int] = {}

    # ------------------------------------------------------------------
    # correlated randomness and resharing

    def _pair_draws(self, n: int) -> list[np.ndarray]:
        return [rng.integers(0, 2**64, size=n, dtype=np.uint64) for rng in self._pair_rng]

    def _zero_shares_arith(self, n: int) -> list[np.ndarray]:
        r = self._pair_draws(n)
        return [r[i] - r[(i - 1) % 3] for i in range(3)]

    def _zero_shares_xor(self, n: int) -> list[np.ndarray]:
        r = self._pair_draws(n)
        return [r[i] ^ r[(i - 1) % 3] for i in range(3)]

    def _reshare(self, local: list[np.ndarray], cls):
        """Send each party's fresh summand to its predecessor; that message is
        what restores the two-of-three replicated structure."""
        inboxes = self.net.exchange([{(i - 1) % 3: local[i]} for i in range(3)])
        # party i now holds (local[i], inboxes[i][i+1]); assemble the components
        return cls([local[0], inboxes[0][1], inboxes[1][2]])

    # ------------------------------------------------------------------
    # sharing entry points

    def share_vector(self, values) -> SharedVector:
        return SharedVector.share(values, self.input_rng)

    def share_public(self, values) -> SharedVector:
        return SharedVector.public(values)

    def reveal(self, shared: SharedVector, parties=(0, 1)) -> np.ndarray:
        """Open a sharing to plaintext (counted against the reveal budget)."""
        return reconstruct(shared.view(parties[0]), shared.view(parties[1]))

    def _fresh_arith(self, contributions: dict[int, np.ndarray], n: int) -> SharedVector:
        """New arithmetic sharing where component j carries contributions[j].

        Used to inject values known to the parties adjacent to component j;
        the zero-sharing keeps each summand uniform.  One round.
        """
        local = self._zero_shares_arith(n)
        for j, v in contributions.items():
            local[j] = local[j] + v
        return self._reshare(local, SharedVector)

    def _fresh_xor(self, contributions: dict[int, np.ndarray], n: int) -> SharedWords:
        local = self._zero_shares_xor(n)
        for j, v in contributions.items():
            local[j] = local[j] ^ v
        return self._reshare(local, SharedWords)

    # ------------------------------------------------------------------
    # multiplicative core

    def mul_vec(self, x: SharedVector, y: SharedVector) -> SharedVector:
        """Element-wise product; one round, one ring element per lane per party."""
        if len(x) != len(y):
            raise LengthMismatchError(f"mul_vec operands differ: {len(x)} vs {len(y)}")
        alpha = self._zero_shares_arith(len(x))
        local = []
        for i in range(3):
            xv, yv = x.view(i), y.view(i)
            local.append(xv.a * yv.a + xv.a * yv.b + xv.b * yv.a + alpha[i])
        self.op_counts["mul_lanes"] = self.op_counts.get("mul_lanes", 0) + len(x)
        return self._reshare(local, SharedVector)

    def and_words(self, x: SharedWords, y: SharedWords) -> SharedWords:
        """Bitwise AND on packed 64-bit words (the Boolean-domain multiply)."""
        if len(x) != len(y):
            raise LengthMismatchError(f"and_words operands differ: {len(x)} vs {len(y)}")
        beta = self._zero_shares_xor(len(x))
        local = []
        for i in range(3):
            xv, yv = x.view(i), y.view(i)
            local.append((xv.a & yv.a) ^ (xv.a & yv.b) ^ (xv.b & yv.a) ^ beta[i])
        return self._reshare(local, SharedWords)

    def mux(self, bit: SharedVector, x: SharedVector, y: SharedVector) -> SharedVector:
        """out = bit * x + (1 - bit) * y, one multiplication round."""
        if not (len(bit) == len(x) == len(y)):
            raise LengthMismatchError("mux operands differ in length")
        return y + self.mul_vec(bit, x - y)

    def outer_product(self, u: SharedVector, v: SharedVector) -> SharedMatrix:
        """M[p][q] = u[p] * v[q] as one batched multiplication of m^2 lanes."""
        if len(u) != len(v):
            raise LengthMismatchError(f"outer_product operands differ: {len(u)} vs {len(v)}")
        m = len(u)
        left = SharedVector([np.repeat(c, m) for c in u.comps])
        right = SharedVector([np.tile(c, m) for c in v.comps])
        return SharedMatrix(self.mul_vec(left, right), m)

    # ------------------------------------------------------------------
    # arithmetic <-> Boolean conversion

    def a2b(self, x: SharedVector) -> SharedWords:
        """Convert to packed Boolean sharing of the same 64-bit values.

        x = u + v with u = c1 + c2 (party 1 holds both components) and
        v = c0 (parties 2 and 0 hold it); both are injected as Boolean
        sharings in one round and added with a Kogge-Stone carry circuit.
        """
        n = len(x)
        u_val = x.comps[1] + x.comps[2]
        v_val = x.comps[0]
        both = self._fresh_xor({1: np.concatenate([u_val, np.zeros(n, dtype=np.uint64)]),
                                0: np.concatenate([np.zeros(n, dtype=np.uint64), v_val])},
                               2 * n)
        u, v = both.split([n, n])
        return self._ks_add(u, v)

    def _ks_add(self, u: SharedWords, v: SharedWords) -> SharedWords:
        p0 = u ^ v
        g = self.and_words(u, v)
        p = p0
        for d in _PREFIX_SHIFTS:
            # batch the two ANDs of this prefix level into a single round
            lhs = SharedWords.concat([p, p])
            rhs = SharedWords.concat([g.shift_left(d), p.shift_left(d)])
            both = self.and_words(lhs, rhs)
            pg, pp = both.split([len(u), len(u)])
            g = g ^ pg
            p = pp
        return p0 ^ g.shift_left(1)

    def bit_decompose(self, x: SharedVector) -> list[SharedWords]:
        """Boolean sharings of each of the 64 bits, least significant first."""
        words = self.a2b(x)
        return [words.bit(k) for k in range(WORD_BITS)]

    def b2a(self, bits: SharedWords) -> SharedVector:
        """Inject 0/1 Boolean-shared bits into the arithmetic domain.

        b = b0 ^ b1 ^ b2; each summand is arithmetic-shared in one round and
        the XORs are realized as x + y - 2xy (two multiplication rounds).
        """
        n = len(bits)
        zeros = np.zeros(n, dtype=np.uint64)
        stacked = self._fresh_arith(
            {j: np.concatenate([zeros] * j + [bits.comps[j]] + [zeros] * (2 - j))
             for j in range(3)},
            3 * n)
        b0, b1, b2 = stacked.split([n, n, n])
        x = b0 + b1 - self.mul_vec(b0, b1).scale_public(2)
        return x + b2 - self.mul_vec(x, b2).scale_public(2)

    # ------------------------------------------------------------------
    # comparison family

    def eq(self, x: SharedVector, y: SharedVector) -> SharedVector:
        """bit_i = [x_i == y_i] as an arithmetic 0/1 sharing."""
        if len(x) != len(y):
            raise LengthMismatchError(f"eq operands differ: {len(x)} vs {len(y)}")
        words = self.a2b(x - y)
        return self.b2a(self._zero_test(words))

    def lt(self, x: SharedVector, y: SharedVector) -> SharedVector:
        """bit_i = [x_i < y_i] for unsigned values below 2^63.

        The difference then lies in (-2^63, 2^63) and its top bit is the
        comparison result.
        """
        if len(x) != len(y):
            raise LengthMismatchError(f"lt operands differ: {len(x)} vs {len(y)}")
        words = self.a2b(x - y)
        return self.b2a(words.bit(WORD_BITS - 1))

    def lt_eq(self, x: SharedVector, y: SharedVector) -> tuple[SharedVector, SharedVector]:
        """Both [x < y] and [x == y] from a single Boolean conversion."""
        if len(x) != len(y):
            raise LengthMismatchError(f"lt_eq operands differ: {len(x)} vs {len(y)}")
        n = len(x)
        words = self.a2b(x - y)
        bits = SharedWords.concat([words.bit(WORD_BITS - 1), self._zero_test(words)])
        both = self.b2a(bits)
        lt_bit, eq_bit = both.split([n, n])
        return lt_bit, eq_bit

    def _zero_test(self, words: SharedWords) -> SharedWords:
        """AND-fold the complemented bits of each word down to bit 0."""
        v = words.invert()
        for d in _FOLD_SHIFTS:
            v = self.and_words(v, v.shift_right(d))
        return v.and_public(1)

    def lex_less(self, pairs: list[tuple[SharedVector, SharedVector]]) -> SharedVector:
        """[ (x1,...,xL) < (y1,...,yL) ] lexicographically, unsigned per key.

        One batched Boolean conversion covers every key column, so the round
        count does not grow with L except for the L-1 combining products.
        """
        n = len(pairs[0][0])
        diffs = SharedVector.concat([x - y for x, y in pairs])
        words = self.a2b(diffs)
        lt_bits = words.bit(WORD_BITS - 1)
        L = len(pairs)
        if L == 1:
            return self.b2a(lt_bits)
        eq_words = SharedWords([c[: (L - 1) * n] for c in words.comps])
        eq_bits = self._zero_test(eq_words)
        both = self.b2a(SharedWords.concat([lt_bits, eq_bits]))
        lts = both.slice(0, L * n).split([n] * L)
        eqs = both.slice(L * n, (2 * L - 1) * n).split([n] * (L - 1))
        acc = lts[-1]
        for k in range(L - 2, -1, -1):
            acc = lts[k] + self.mul_vec(eqs[k], acc)
        return acc


def cost_probe(primitive: str, n: int = 64) -> dict:
    """Measure (rounds, bytes sent per party per lane) for one primitive.

    Runs the primitive on a scratch engine and reports the delta of the
    ledger around the call, so the numbers are the actual protocol costs.
    """
    probe = SecureEngine(seed=1234)
    x = probe.share_vector(random_ring(np.random.default_rng(1), n) >> np.uint64(1))
    y = probe.share_vector(random_ring(np.random.default_rng(2), n) >> np.uint64(1))
    bit = probe.share_vector(np.ones(n, dtype=np.uint64))
    calls = {
        "mul_vec": lambda: probe.mul_vec(x, y),
        "mux": lambda: probe.mux(bit, x, y),
        "eq": lambda: probe.eq(x, y),
        "lt": lambda: probe.lt(x, y),
        "lt_eq": lambda: probe.lt_eq(x, y),
        "bit_decompose": lambda: probe.bit_decompose(x),
        "b2a": lambda: probe.b2a(probe.a2b(x).bit(0)),
        "outer_product": lambda: probe.outer_product(x.slice(0, 8), y.slice(0, 8)),
    }
    if primitive not in calls:
        raise ValueError(f"unknown primitive: {primitive}")
    if primitive == "b2a":
        # burn the a2b setup outside the measured window
        bits = probe.a2b(x).bit(0)
        calls["b2a"] = lambda: probe.b2a(bits)
    lanes = 64 if primitive == "outer_product" else n
    rounds_before = probe.net.rounds
    sent_before = [probe.net.ledger.bytes_sent_by(i) for i in range(3)]
    calls[primitive]()
    return {
        "rounds": probe.net.rounds - rounds_before,
        "bytes_per_party_per_lane": [
            (probe.net.ledger.bytes_sent_by(i) - sent_before[i]) / lanes for i in range(3)
        ],
    }


def cost_table(probe_length: int = 64) -> dict:
    """Primitive -> (rounds, bytes/party/lane), measured at build/run time."""
    return {
        name: cost_probe(name, probe_length)
        for name in ("mul_vec", "mux", "eq", "lt", "lt_eq", "bit_decompose", "b2a",
                     "outer_product")
    }
