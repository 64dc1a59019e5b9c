"""
Mining labeled character patches from text fields with known content.

Every field is segmented with the OCR pipeline. A field is accepted only if
the number of extracted characters equals the number of non-space symbols
of its ground truth; each patch then takes the symbol at its position. The
model's predictions never gate a patch, they only count how many labels the
positional correction changed.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..classify.model import Model
from ..errors import IdOcrError
from ..segment import SegmentConfig, segment_field
from ..synthgen.charset import CHARSET
from ..synthgen.corpus import FieldRecord
from ..synthgen.generator import CharSample
from ..synthgen.rng import derive_seed
from ..utils import ProgressLogger, get_logger, ordered_map

PathLike = Union[str, Path]

COUNT_MISMATCH = "count mismatch"
OUTSIDE_CHARSET = "text outside charset"
UNREADABLE = "unreadable field"


@dataclass(frozen=True)
class FieldMining:
    """Outcome for one field: mined samples or a skip reason."""

    index: int
    samples: List[CharSample] = field(default_factory=list)
    corrected: int = 0
    skip_reason: Optional[str] = None


@dataclass(frozen=True)
class MiningResult:
    samples: List[CharSample]
    skipped: Dict[str, int]
    corrected_count: int
    field_count: int

    @property
    def mined_count(self) -> int:
        return len(self.samples)

    @property
    def skipped_count(self) -> int:
        return sum(self.skipped.values())

    def per_class(self) -> Dict[int, int]:
        return dict(sorted(Counter(s.label for s in self.samples).items()))


def ground_truth_labels(text: str) -> Optional[List[int]]:
    """Class ids of the non-space symbols of text, None if any is outside the charset."""
    symbols = [c for c in text if not c.isspace()]
    if any(c not in CHARSET for c in symbols):
        return None
    return CHARSET.ids(symbols)


def mine_field(model: Model, record: FieldRecord, index: int, root: PathLike,
               config: SegmentConfig) -> FieldMining:
    labels = ground_truth_labels(record.text)
    if labels is None:
        return FieldMining(index=index, skip_reason=OUTSIDE_CHARSET)
    image = record.load_image(root)
    chars = segment_field(image, config).flat_chars()
    if len(chars) != len(labels):
        return FieldMining(index=index, skip_reason=COUNT_MISMATCH)
    if not chars:
        return FieldMining(index=index)

    predictions = model.predict_batch([c.patch for c in chars])
    samples = [
        CharSample(image=c.patch, label=label, provenance="mined",
                   seed=derive_seed(record.seed, "mined", position), field_seed=record.seed)
        for position, (c, label) in enumerate(zip(chars, labels))
    ]
    corrected = sum(1 for p, label in zip(predictions, labels) if p.class_id != label)
    return FieldMining(index=index, samples=samples, corrected=corrected)


def mine_patches(
    model: Model,
    records: Sequence[FieldRecord],
    root: PathLike,
    config: Optional[SegmentConfig] = None,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> MiningResult:
    """
    Mine label-corrected patches from a field corpus.

    Per-field failures are logged and counted as skips; they never abort the run.

    Raises:
        CharsetMismatchError: model built for another charset
    """
    config = config or SegmentConfig()
    logger = logger or get_logger("bootstrap.miner")
    model.check_charset(CHARSET.hash)

    progress = ProgressLogger(logger, every=max(1, len(records) // 10))
    progress.start_operation("mine_patches", len(records))

    def work(item: Tuple[int, FieldRecord]) -> FieldMining:
        index, record = item
        try:
            outcome = mine_field(model, record, index, root, config)
        except (IdOcrError, OSError, ValueError) as e:
            logger.warning(f"Field {record.path} failed during mining: {e}")
            outcome = FieldMining(index=index, skip_reason=UNREADABLE)
        progress.advance("mine_patches", len(records), record.path)
        return outcome

    outcomes = ordered_map(work, list(enumerate(records)), threads)
    samples = [s for o in outcomes for s in o.samples]
    skipped = Counter(o.skip_reason for o in outcomes if o.skip_reason is not None)
    result = MiningResult(
        samples=samples,
        skipped=dict(sorted(skipped.items())),
        corrected_count=sum(o.corrected for o in outcomes),
        field_count=len(records),
    )
    progress.complete_operation("mine_patches", len(records), len(records) - result.skipped_count,
                                result.skipped_count, mined=result.mined_count,
                                corrected=result.corrected_count)
    return result
