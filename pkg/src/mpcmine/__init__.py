"""Secure three-party computation of annotated directly-follows graphs."""

from .events import RawEvent, parse_csv
from .pipeline import QuerySpec, RunConfig, run_pipeline, split_round_robin
from .protocols import SecureEngine
from .results import QueryResult

__version__ = "0.1.0"

__all__ = [
    "RawEvent", "parse_csv", "QuerySpec", "RunConfig", "run_pipeline",
    "split_round_robin", "SecureEngine", "QueryResult", "__version__",
]
