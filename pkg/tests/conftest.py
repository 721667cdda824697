import numpy as np
import pytest

from mpcmine.protocols import SecureEngine
from mpcmine.sharing import SharedVector
from mpcmine.sorting import SharedEventTable


@pytest.fixture
def engine():
    return SecureEngine(seed=1000)


def make_table(engine, trace, ts, act_index, width) -> SharedEventTable:
    """Share plaintext columns into an event table; act_index -1 = dummy row."""
    trace = np.asarray(trace, dtype=np.uint64)
    ts = np.asarray(ts, dtype=np.uint64)
    act = np.asarray(act_index, dtype=np.int64)
    return SharedEventTable(
        engine.share_vector(trace),
        engine.share_vector(ts),
        SharedVector.public(np.arange(len(trace), dtype=np.uint64)),
        [engine.share_vector((act == p).astype(np.uint64)) for p in range(width)],
    )
