"""
Shared utilities: logging, the ordered worker pool and deterministic JSON I/O.
"""

from .jsonio import dumps, iter_jsonl, read_json, read_jsonl, write_json, write_jsonl
from .logger import ProgressLogger, get_logger, setup_logger
from .tomlio import load_toml, loads_toml
from .workers import default_threads, ordered_map, resolve_threads

__all__ = [
    "ProgressLogger",
    "get_logger",
    "setup_logger",
    "default_threads",
    "ordered_map",
    "resolve_threads",
    "load_toml",
    "loads_toml",
    "dumps",
    "iter_jsonl",
    "read_json",
    "read_jsonl",
    "write_json",
    "write_jsonl",
]
