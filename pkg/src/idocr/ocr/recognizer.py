"""
End-to-end field recognition: segment, classify every patch, assemble, post-process.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..classify.model import Model
from ..imaging import GrayImage
from ..segment import Box, SegmentConfig, segment_field
from ..synthgen.charset import CHARSET
from ..synthgen.corpus import FieldRecord
from ..utils import ProgressLogger, get_logger, ordered_map
from .format_rules import Correction, FormatRule, apply_format_rule

PathLike = Union[str, Path]


@dataclass(frozen=True)
class CharResult:
    symbol: str
    probability: float
    box: Box

    def to_dict(self) -> Dict[str, Any]:
        return {"symbol": self.symbol, "probability": self.probability, "box": self.box.to_list()}


@dataclass(frozen=True)
class FieldResult:
    """
    Recognized text and its characters.

    text joins the strings with single spaces; symbols is the same text
    without them, one symbol per entry of chars in reading order.
    """

    text: str
    chars: List[CharResult] = field(default_factory=list)
    corrections: List[Correction] = field(default_factory=list)
    rule_id: Optional[str] = None
    string_lengths: List[int] = field(default_factory=list)

    @property
    def symbols(self) -> str:
        return "".join(c.symbol for c in self.chars)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "text": self.text,
            "symbols": self.symbols,
            "rule": self.rule_id,
            "chars": [c.to_dict() for c in self.chars],
            "corrections": [c.to_dict() for c in self.corrections],
        }


def assemble(symbols: Sequence[str], string_lengths: Sequence[int]) -> str:
    """Concatenate symbols string by string, one space between strings."""
    words: List[str] = []
    start = 0
    for length in string_lengths:
        words.append("".join(symbols[start:start + length]))
        start += length
    return " ".join(w for w in words if w)


def recognize_field(
    model: Model,
    image: GrayImage,
    rule: Optional[FormatRule] = None,
    config: Optional[SegmentConfig] = None,
    logger: Optional[logging.Logger] = None,
) -> FieldResult:
    """Read one field image; a field without characters gives an empty result."""
    segmentation = segment_field(image, config or SegmentConfig())
    chars = segmentation.flat_chars()
    rule_id = rule.rule_id if rule is not None else None
    if not chars:
        return FieldResult(text="", rule_id=rule_id)

    predictions = model.predict_batch([c.patch for c in chars])
    probabilities = np.stack([p.probabilities for p in predictions])
    if rule is not None:
        ids, corrections = apply_format_rule(probabilities, rule, logger)
    else:
        ids, corrections = [p.class_id for p in predictions], []

    results = [
        CharResult(symbol=CHARSET.symbol(i), probability=float(row[i]), box=c.box)
        for i, row, c in zip(ids, probabilities, chars)
    ]
    lengths = segmentation.string_lengths()
    return FieldResult(
        text=assemble([r.symbol for r in results], lengths),
        chars=results,
        corrections=corrections,
        rule_id=rule_id,
        string_lengths=lengths,
    )


def recognize_corpus(
    model: Model,
    records: Sequence[FieldRecord],
    root: PathLike,
    rules: Optional[Dict[str, FormatRule]] = None,
    config: Optional[SegmentConfig] = None,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> List[Tuple[FieldRecord, FieldResult]]:
    """Recognize every field of a corpus, using the rule named by each record."""
    logger = logger or get_logger("ocr")
    rules = rules or {}
    progress = ProgressLogger(logger, every=max(1, len(records) // 10))
    progress.start_operation("recognize", len(records))

    def work(record: FieldRecord) -> Tuple[FieldRecord, FieldResult]:
        rule = rules.get(record.rule) if record.rule else None
        if record.rule and rule is None:
            logger.warning(f"Field {record.path}: no format rule '{record.rule}', decoding unconstrained")
        result = recognize_field(model, record.load_image(root), rule, config, logger)
        progress.advance("recognize", len(records), record.path)
        return record, result

    results = ordered_map(work, records, threads)
    progress.complete_operation("recognize", len(records), len(results))
    return results
