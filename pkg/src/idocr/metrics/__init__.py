"""
Evaluation metrics: edit distance, field accuracy, confusion matrices and latency.
"""

from .benchmark import LatencyStats, benchmark_latency
from .evaluation import EvalReport, evaluate_fields, export_confusion_csv, write_report
from .levenshtein import levenshtein

__all__ = [
    "LatencyStats",
    "benchmark_latency",
    "EvalReport",
    "evaluate_fields",
    "export_confusion_csv",
    "write_report",
    "levenshtein",
]
