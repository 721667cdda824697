"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s`.  Criterion 2 additionally
needs the public incident-management log (BPIC 2013, closed problems) as a
CSV; point MPCMINE_BPIC2013 at it or drop it at data/bpic2013.csv.  Without
the file that half of criterion 2 is skipped and a same-shape synthetic
stand-in is checked instead.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from mpcmine import sharing
from mpcmine.dfg import build_dfg
from mpcmine.events import parse_csv, prepare
from mpcmine.oracle import plain_dfg
from mpcmine.pipeline import (QuerySpec, RunConfig, public_setup, run_pipeline,
                              split_round_robin)
from mpcmine.protocols import SecureEngine
from mpcmine.queries import topk_bottlenecks, topk_handoffs
from mpcmine.sharing import peek, share
from mpcmine.sorting import sort_chunk
from mpcmine.synth import bpic13_like, synth_log

from conftest import make_table


def _verdict(n, text):
    print(f"\n[criterion {n}] PASS - {text}")


def _secure_equals_oracle(events, chunks, seed):
    """Exact (G, W) equality between the secure pipeline and the oracle."""
    a, b = split_round_robin(events)
    dict_a, dict_b, order, meta = public_setup(a, b, chunks)
    engine = SecureEngine(seed=seed)
    shared, _ = build_dfg(engine, prepare(a, dict_a, meta.l_max, order),
                          prepare(b, dict_b, meta.l_max, order), chunks)
    width = meta.width
    got_g = peek(shared.counts.vec).astype(object).reshape(width, width).tolist()
    got_w = peek(shared.durations.vec).astype(object).reshape(width, width).tolist()
    index_of = {n: dict_a.index_of(n) for n in dict_a.local_names}
    index_of.update({n: dict_b.index_of(n) for n in dict_b.local_names})
    exp_g, exp_w = plain_dfg(a, b, index_of, width)
    assert got_g == exp_g, "count matrix diverged from the oracle"
    assert got_w == exp_w, "duration matrix diverged from the oracle"
    return meta


def test_criterion_1_oracle_equivalence_200_logs():
    rng = np.random.default_rng(0xC0DE)
    t0 = time.perf_counter()
    for i in range(200):
        traces = int(np.exp(rng.uniform(np.log(5), np.log(200))))
        max_len = int(rng.integers(1, 21))
        acts = int(rng.integers(3, 13))
        events = synth_log(seed=10_000 + i, traces=traces, min_len=1,
                           max_len=max_len, activities=acts, tie_fraction=0.15)
        chunks = 4 if traces >= 8 else 1
        _secure_equals_oracle(events, chunks, seed=i)
    elapsed = time.perf_counter() - t0
    _verdict(1, f"200 seeded logs matched the plaintext oracle exactly "
                f"({elapsed:.0f}s)")


def _bpic_path():
    env = os.environ.get("MPCMINE_BPIC2013")
    if env:
        return Path(env)
    local = Path(__file__).resolve().parent.parent / "data" / "bpic2013.csv"
    return local if local.exists() else None


def test_criterion_2a_public_shape_equivalence():
    # a log with the public dataset's shape at downsample scale, always runnable
    synthetic = bpic13_like(seed=13, cases=200)
    meta = _secure_equals_oracle(synthetic, chunks=8, seed=2)
    assert meta.m_a + meta.m_b == 6
    _verdict("2a", "200-case log with the public dataset's shape equal to "
                   "oracle exactly")


def test_criterion_2b_public_data_equivalence():
    path = _bpic_path()
    if path is None or not path.exists():
        pytest.skip("public incident log CSV not provided; set MPCMINE_BPIC2013 "
                    "or place it at data/bpic2013.csv")
    events = parse_csv(path.read_bytes())
    cases = {e.case_id for e in events}
    acts = {e.activity for e in events}
    assert len(events) == 6660, f"expected 6,660 events, got {len(events)}"
    assert len(cases) == 1432, f"expected 1,432 cases, got {len(cases)}"
    assert len(acts) == 6, f"expected 6 activities, got {len(acts)}"
    # documented 200-case downsample keeps the run inside a desk-scale budget
    keep = set(sorted(cases)[:200])
    sample = [e for e in events if e.case_id in keep]
    _secure_equals_oracle(sample, chunks=8, seed=3)
    _verdict("2b", "public log (200-case downsample) equal to oracle exactly")


def test_criterion_3_chunk_invariance():
    events = synth_log(seed=33, traces=24, max_len=6, activities=5, tie_fraction=0.2)
    a, b = split_round_robin(events)
    outputs = set()
    for chunks in (1, 2, 4, 8, 16):
        res = run_pipeline(a, b, RunConfig(chunk_count=chunks, seed=7,
                                           query=QuerySpec("topk-handoffs", k=4)))
        outputs.add(res.query_result.to_json_str())
    assert len(outputs) == 1, "query JSON varied with chunk count"
    _verdict(3, "query JSON byte-identical across chunk counts {1,2,4,8,16}")


def test_criterion_4_padding_neutrality():
    events = synth_log(seed=44, traces=12, max_len=7, activities=5)
    a, b = split_round_robin(events)
    base_cfg = RunConfig(chunk_count=2, seed=9, unsafe_reveal_dfg=True,
                         query=QuerySpec("topk-handoffs", k=2))
    base = run_pipeline(a, b, base_cfg)
    inflated = run_pipeline(a, b, RunConfig(
        chunk_count=2, seed=9, unsafe_reveal_dfg=True,
        query=QuerySpec("topk-handoffs", k=2),
        l_max=base.metadata.l_max + 5))
    assert base.dfg_dump == inflated.dfg_dump, "dummy rows altered a DFG cell"
    _verdict(4, "inflating trace padding by 5 changed no DFG cell")


def test_criterion_5_protocol_oracle_suite():
    eng = SecureEngine(seed=55)
    grid = np.arange(256, dtype=np.uint64)
    x8 = np.repeat(grid, 256)
    y8 = np.tile(grid, 256)
    eq8 = peek(eng.eq(eng.share_vector(x8), eng.share_vector(y8)))
    lt8 = peek(eng.lt(eng.share_vector(x8), eng.share_vector(y8)))
    assert np.array_equal(eq8, (x8 == y8).astype(np.uint64)), "eq failed on 8-bit domain"
    assert np.array_equal(lt8, (x8 < y8).astype(np.uint64)), "lt failed on 8-bit domain"

    rng = np.random.default_rng(56)
    xe = rng.integers(0, 2**64, 10_000, dtype=np.uint64)
    ye = xe.copy()
    flip = rng.random(10_000) < 0.5
    ye[flip] = rng.integers(0, 2**64, int(flip.sum()), dtype=np.uint64)
    assert np.array_equal(peek(eng.eq(eng.share_vector(xe), eng.share_vector(ye))),
                          (xe == ye).astype(np.uint64))
    # lt's contract covers unsigned values below 2^63
    xl = rng.integers(0, 2**63, 10_000, dtype=np.uint64)
    yl = rng.integers(0, 2**63, 10_000, dtype=np.uint64)
    assert np.array_equal(peek(eng.lt(eng.share_vector(xl), eng.share_vector(yl))),
                          (xl < yl).astype(np.uint64))

    xm = rng.integers(0, 2**64, 10_000, dtype=np.uint64)
    ym = rng.integers(0, 2**64, 10_000, dtype=np.uint64)
    assert np.array_equal(peek(eng.mul_vec(eng.share_vector(xm), eng.share_vector(ym))),
                          xm * ym)
    _verdict(5, "eq/lt exhaustive at 8 bits (65,536 pairs each), 10^4 random "
                "lanes for eq/lt/mul_vec all exact")


def test_criterion_6_cost_accounting():
    # mul_vec: exactly 8n bytes per party in exactly one round
    for n in (1, 100, 4096):
        eng = SecureEngine(seed=66)
        x = eng.share_vector(np.arange(n, dtype=np.uint64))
        r0, s0 = eng.net.rounds, [eng.net.ledger.bytes_sent_by(i) for i in range(3)]
        eng.mul_vec(x, x)
        assert eng.net.rounds - r0 == 1
        assert all(eng.net.ledger.bytes_sent_by(i) - s0[i] == 8 * n for i in range(3))

    # Batcher sort: comparator count and ledger bytes match the closed form
    def sort_cost(n):
        eng = SecureEngine(seed=67)
        rng = np.random.default_rng(n)
        table = make_table(eng, rng.integers(0, 97, n, dtype=np.uint64),
                           rng.integers(0, 1_000_000, n, dtype=np.uint64),
                           [0] * n, width=1)
        with eng.net.phase("sort"):
            sort_chunk(eng, table)
        return (eng.op_counts["comparators"],
                eng.net.ledger.phases["sort"].bytes_sent_by(0))

    _, bytes_per_comparator = sort_cost(2)  # k=1: exactly one comparator
    for n in (8, 16, 64, 256):
        k = n.bit_length() - 1
        closed = (k * k - k + 4) * 2 ** (k - 2) - 1
        comparators, sort_bytes = sort_cost(n)
        assert comparators == closed, f"n={n}: {comparators} != {closed}"
        assert sort_bytes == closed * bytes_per_comparator, \
            f"n={n}: ledger bytes {sort_bytes} != {closed} * {bytes_per_comparator}"
    _verdict(6, "mul_vec at 8n bytes/party/round; Batcher comparator counts and "
                "ledger bytes match (k^2-k+4)*2^(k-2)-1 for n in {8,16,64,256}")


def test_criterion_7_chunk_scaling_trends():
    events = synth_log(seed=77, traces=64, min_len=10, max_len=10, activities=6)
    a, b = split_round_robin(events)
    sort_bytes, sort_rounds, dfg_bytes = [], [], []
    for chunks in (1, 2, 4, 8):
        res = run_pipeline(a, b, RunConfig(chunk_count=chunks, seed=11,
                                           query=QuerySpec("topk-handoffs", k=1)))
        phases = res.report.phases
        sort_bytes.append(phases["sort"]["total_bytes"])
        sort_rounds.append(phases["sort"]["rounds"])
        dfg_bytes.append(phases["dfg"]["total_bytes"])
    assert all(x >= y for x, y in zip(sort_bytes, sort_bytes[1:])), sort_bytes
    assert all(x >= y for x, y in zip(sort_rounds, sort_rounds[1:])), sort_rounds
    spread = (max(dfg_bytes) - min(dfg_bytes)) / dfg_bytes[0]
    assert spread <= 0.01, f"dfg bytes varied by {spread:.3%}"
    _verdict(7, f"sort bytes {sort_bytes} and rounds {sort_rounds} non-increasing "
                f"over chunks 1,2,4,8; dfg bytes constant within {spread:.2%}")


def test_criterion_8_privacy_observables():
    # (a) same-shape inputs leave identical per-round message lengths
    def transcript(content_seed):
        events = synth_log(seed=content_seed, traces=10, max_len=6, activities=4)
        a, b = split_round_robin(events)
        dict_a, dict_b, order, meta = public_setup(a, b, 2, l_max=6)
        engine = SecureEngine(seed=88)
        build_dfg(engine, prepare(a, dict_a, 6, order),
                  prepare(b, dict_b, 6, order), 2)
        return engine.net.transcript_shape()

    assert transcript(1) == transcript(2), "transcript shape leaked input content"

    # (b) chi-square uniformity of a single party's share view at 8-bit width
    view = share(np.full(100_000, 42, dtype=np.uint64),
                 np.random.default_rng(89)).view(0)
    for comp in (view.a, view.b):
        counts = np.bincount((comp & np.uint64(0xFF)).astype(np.int64), minlength=256)
        _, p = stats.chisquare(counts)
        assert p > 0.01, f"share view not uniform: p={p}"

    # (c) top-k reveal counts equal the documented output arity
    events = synth_log(seed=90, traces=10, max_len=5, activities=4)
    a, b = split_round_robin(events)
    dict_a, dict_b, order, meta = public_setup(a, b, 1)
    engine = SecureEngine(seed=91)
    dfg, _ = build_dfg(engine, prepare(a, dict_a, meta.l_max, order),
                       prepare(b, dict_b, meta.l_max, order), 1)
    before = sharing.reveal_count()
    res = topk_handoffs(engine, dfg, 3, meta)
    assert sharing.reveal_count() - before == 2 * 3 == res.reveal_count
    before = sharing.reveal_count()
    res = topk_bottlenecks(engine, dfg, 2, meta)
    assert sharing.reveal_count() - before == 3 * 2 == res.reveal_count
    _verdict(8, "transcript shape input-independent; share views uniform at "
                "p>0.01 over 10^5 samples; top-k reveal counts exact")
