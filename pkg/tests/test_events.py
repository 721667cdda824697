import pytest

from mpcmine.events import (DUMMY_TS, LogFormatError, RawEvent,
                            TimestampRangeError, assign_chunks,
                            build_dictionary, parse_csv, prepare)
from mpcmine.oracle import plain_dfg
from mpcmine.pipeline import split_round_robin
from mpcmine.synth import synth_log, to_csv


def ev(case, act, ts):
    return RawEvent(case, act, ts)


# ---------------------------------------------------------------- parse_csv

def test_parse_direct_transcription():
    events = parse_csv("case_id,activity,timestamp\nc1,A,100\nc1,B,160\n")
    assert events == [ev("c1", "A", 100), ev("c1", "B", 160)]


def test_parse_header_only():
    assert parse_csv("case_id,activity,timestamp\n") == []


def test_parse_totally_empty_input():
    with pytest.raises(LogFormatError, match="missing header"):
        parse_csv("")


def test_parse_iso_timestamps():
    events = parse_csv("case_id,activity,timestamp\nc1,A,1970-01-01T00:02:00+00:00\n"
                       "c1,B,1970-01-01T00:02:01Z\n")
    assert [e.timestamp for e in events] == [120, 121]


def test_parse_errors_name_the_line():
    with pytest.raises(LogFormatError, match="line 3"):
        parse_csv("case_id,activity,timestamp\nc1,A,100\nc1,B\n")
    with pytest.raises(LogFormatError, match="line 2"):
        parse_csv("case_id,activity,timestamp\nc1,A,notatime\n")
    with pytest.raises(LogFormatError, match="line 1"):
        parse_csv("who,what,when\nc1,A,100\n")


def test_parse_timestamp_range():
    with pytest.raises(TimestampRangeError, match="2\\^62"):
        parse_csv(f"case_id,activity,timestamp\nc1,A,{1 << 62}\n")
    with pytest.raises(TimestampRangeError):
        parse_csv("case_id,activity,timestamp\nc1,A,-5\n")


def test_parse_accepts_bytes():
    assert len(parse_csv(b"case_id,activity,timestamp\nc1,A,1\n")) == 1


# ---------------------------------------------------------------- dictionary

def test_dictionary_sorted_assignment():
    d = build_dictionary(["B", "A"], 0, 4)
    assert d.index_of("A") == 0 and d.index_of("B") == 1
    d2 = build_dictionary(["C"], 2, 4)
    assert d2.index_of("C") == 2
    assert d2.name_of(2) == "C"


def test_dictionary_duplicate_and_overflow():
    with pytest.raises(LogFormatError, match="duplicate"):
        build_dictionary(["A", "A"], 0, 4)
    with pytest.raises(LogFormatError):
        build_dictionary(["A", "B", "C"], 2, 4)


def test_traffic_fines_style_split_counts():
    # 11 activities round-robin: applying the splitter must put 6 on A, 5 on B
    names = [f"Act{i:02d}" for i in range(11)]
    events = [ev(f"c{i}", names[i % 11], 100 + i) for i in range(110)]
    a, b = split_round_robin(events)
    acts_a = {e.activity for e in a}
    acts_b = {e.activity for e in b}
    assert len(acts_a) == 6 and len(acts_b) == 5
    assert acts_a == set(sorted(names)[0::2])


# ---------------------------------------------------------------- prepare

def test_prepare_single_pad():
    d = build_dictionary(["A"], 0, 2)
    prep = prepare([ev("c1", "A", 100)], d, l_max=2)
    rows = list(prep.rows())
    assert rows[0] == (0, (1, 0), 100)
    assert rows[1] == (0, (0, 0), DUMMY_TS)


def test_prepare_credit_requirement_shape_no_dummies():
    # equal-length traces (the public credit-check log is 15/15/15): zero padding
    d = build_dictionary([f"A{i}" for i in range(8)], 0, 8)
    events = [ev(f"c{t}", f"A{j % 8}", 1000 + j) for t in range(12) for j in range(15)]
    prep = prepare(events, d, l_max=15)
    assert prep.event_count() == len(events)
    assert (prep.act_index >= 0).all()


def test_prepare_dummy_arithmetic():
    d = build_dictionary(["A"], 0, 1)
    events = [ev("c1", "A", 1), ev("c1", "A", 2),
              ev("c2", "A", 1), ev("c2", "A", 2), ev("c2", "A", 3)]
    prep = prepare(events, d, l_max=3)
    assert int((prep.act_index < 0).sum()) == 1


def test_prepare_rejects_overlong_trace():
    d = build_dictionary(["A"], 0, 1)
    with pytest.raises(LogFormatError, match="exceeds"):
        prepare([ev("c", "A", t) for t in range(4)], d, l_max=3)


def test_prepare_sorts_within_trace_and_is_stable():
    d = build_dictionary(["A", "B", "C"], 0, 3)
    events = [ev("c", "B", 50), ev("c", "A", 10), ev("c", "C", 50)]
    prep = prepare(events, d, l_max=3)
    # ties keep ingestion order: B@50 (file pos 0) before C@50 (file pos 2)
    assert [int(a) for a in prep.act_index] == [0, 1, 2]


def test_prepare_trace_indices_follow_sorted_case_order():
    d = build_dictionary(["A"], 0, 1)
    events = [ev("zeta", "A", 1), ev("alpha", "A", 2)]
    prep = prepare(events, d, l_max=1)
    assert prep.case_order == ("alpha", "zeta")
    assert prep.trace_index.tolist() == [0, 1]


def test_prepare_round_trip_multiset():
    events = synth_log(seed=3, traces=9, max_len=6, activities=4)
    names = sorted({e.activity for e in events})
    d = build_dictionary(names, 0, len(names))
    prep = prepare(events, d, l_max=6)
    decoded = []
    for t, onehot, ts in prep.rows():
        if any(onehot):
            decoded.append((prep.case_order[t], d.name_of(onehot.index(1)), ts))
    assert sorted(decoded) == sorted((e.case_id, e.activity, e.timestamp) for e in events)


def test_padded_rows_never_alter_plaintext_dfg():
    # accumulate adjacent pairs straight off the prepared rows (dummies have
    # zero one-hot) and compare with the raw-event oracle
    events = synth_log(seed=4, traces=8, max_len=5, activities=3, tie_fraction=0.3)
    names = sorted({e.activity for e in events})
    d = build_dictionary(names, 0, len(names))
    for l_max in (5, 9):  # natural and inflated padding
        prep = prepare(events, d, l_max=l_max)
        width = len(names)
        G = [[0] * width for _ in range(width)]
        rows = list(prep.rows())
        for (t1, oh1, ts1), (t2, oh2, ts2) in zip(rows, rows[1:]):
            if t1 == t2 and any(oh1) and any(oh2):
                G[oh1.index(1)][oh2.index(1)] += 1
        expected, _ = plain_dfg(events, [], {n: d.index_of(n) for n in names}, width)
        assert G == expected


# ---------------------------------------------------------------- chunking

def _chunk_fixture(traces, l_max=2):
    d = build_dictionary(["A"], 0, 1)
    events = [ev(f"c{t:02d}", "A", 10 * t + j) for t in range(traces) for j in range(2)]
    return prepare(events, d, l_max=l_max)


def test_chunks_mod_rule():
    chunks = assign_chunks(_chunk_fixture(4), 2)
    assert sorted(set(chunks[0].trace_index.tolist())) == [0, 2]
    assert sorted(set(chunks[1].trace_index.tolist())) == [1, 3]


def test_chunks_equalized_with_dummy_trace():
    chunks = assign_chunks(_chunk_fixture(5), 2)
    assert len(chunks[0]) == len(chunks[1]) == 3 * 2
    # chunk 1 got one all-dummy trace with a fresh index past T=5
    dummy_rows = chunks[1].act_index < 0
    assert dummy_rows.sum() == 2
    assert set(chunks[1].trace_index[dummy_rows].tolist()) == {5}


def test_chunks_identity():
    prep = _chunk_fixture(1)
    (only,) = assign_chunks(prep, 1)
    assert only.trace_index.tolist() == prep.trace_index.tolist()


def test_chunks_partition_non_dummy_rows():
    prep = _chunk_fixture(7)
    chunks = assign_chunks(prep, 3)
    real = lambda p: [(int(t), int(ts)) for t, a, ts in
                      zip(p.trace_index, p.act_index, p.timestamp) if a >= 0]
    union = [r for c in chunks for r in real(c)]
    assert sorted(union) == sorted(real(prep))
    assert len(union) == len(set(union))


def test_chunk_count_one_or_more():
    with pytest.raises(ValueError):
        assign_chunks(_chunk_fixture(2), 0)


def test_csv_round_trip_through_generator():
    events = synth_log(seed=5, traces=4, max_len=3, activities=3)
    again = parse_csv(to_csv(events))
    assert again == events
