"""
Field-level evaluation: edit-distance accuracy, per-class accuracy and the confusion matrix.
"""

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..errors import ShapeMismatchError
from ..synthgen.charset import CHARSET, NUM_CLASSES
from ..utils import write_json
from .benchmark import LatencyStats
from .levenshtein import levenshtein

PathLike = Union[str, Path]


@dataclass(frozen=True)
class EvalReport:
    """
    Aggregate over paired predictions and ground truths.

    Per-class numbers come only from aligned fields, i.e. fields whose
    predicted non-space symbol count equals the ground truth's.
    """

    field_count: int
    correct_count: int
    mean_distance: float
    confusion: np.ndarray
    aligned_fields: int
    unaligned_fields: int
    latency: Optional[LatencyStats] = None
    distances: List[int] = field(default_factory=list)

    @property
    def correct_rate(self) -> float:
        return self.correct_count / self.field_count if self.field_count else 0.0

    @property
    def support(self) -> np.ndarray:
        return self.confusion.sum(axis=1)

    def per_class_accuracy(self) -> Dict[int, float]:
        """Recall of every class that occurs in the aligned fields."""
        support = self.support
        return {int(c): float(self.confusion[c, c] / support[c])
                for c in np.flatnonzero(support)}

    @property
    def class_wise_accuracy(self) -> float:
        per_class = self.per_class_accuracy()
        return float(np.mean(list(per_class.values()))) if per_class else 0.0

    @property
    def char_accuracy(self) -> float:
        total = int(self.confusion.sum())
        return float(np.trace(self.confusion) / total) if total else 0.0

    def with_latency(self, latency: LatencyStats) -> "EvalReport":
        return replace(self, latency=latency)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field_count": self.field_count,
            "correct_count": self.correct_count,
            "correct_rate": self.correct_rate,
            "mean_distance": self.mean_distance,
            "char_accuracy": self.char_accuracy,
            "class_wise_accuracy": self.class_wise_accuracy,
            "per_class_accuracy": {CHARSET.symbol(c): acc
                                   for c, acc in sorted(self.per_class_accuracy().items())},
            "aligned_fields": self.aligned_fields,
            "unaligned_fields": self.unaligned_fields,
            "confusion": self.confusion.tolist(),
            "latency": self.latency.to_dict() if self.latency is not None else None,
        }


def _symbols(text: str) -> List[str]:
    return [c for c in text if not c.isspace()]


def evaluate_fields(predictions: Sequence[str], truths: Sequence[str]) -> EvalReport:
    """
    Compare recognized texts against ground truth, field by field.

    A field counts as correct iff its edit distance is zero.

    Raises:
        ShapeMismatchError: the two lists differ in length
    """
    if len(predictions) != len(truths):
        raise ShapeMismatchError(
            f"{len(predictions)} results for {len(truths)} ground truths"
        )
    confusion = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    distances: List[int] = []
    aligned = 0
    for predicted, truth in zip(predictions, truths):
        distances.append(levenshtein(predicted, truth))
        p, t = _symbols(predicted), _symbols(truth)
        if len(p) != len(t) or any(s not in CHARSET for s in p + t):
            continue
        aligned += 1
        for true_symbol, predicted_symbol in zip(t, p):
            confusion[CHARSET.id(true_symbol), CHARSET.id(predicted_symbol)] += 1

    return EvalReport(
        field_count=len(truths),
        correct_count=sum(1 for d in distances if d == 0),
        mean_distance=float(np.mean(distances)) if distances else 0.0,
        confusion=confusion,
        aligned_fields=aligned,
        unaligned_fields=len(truths) - aligned,
        distances=distances,
    )


def write_report(report: EvalReport, path: PathLike) -> None:
    write_json(report.to_dict(), path)


def export_confusion_csv(report: EvalReport, path: PathLike) -> None:
    """Confusion matrix as CSV: rows are true symbols, columns predicted ones."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["true\\predicted", *CHARSET.symbols])
        for class_id, row in enumerate(report.confusion):
            writer.writerow([CHARSET.symbol(class_id), *(int(v) for v in row)])
