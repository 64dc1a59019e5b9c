"""
On-disk character and field corpora.

Character corpus layout:
    <root>/<split>/<classid>/<index>.png
    <root>/manifest.jsonl     one record per sample (path, class, seed, provenance, ...)
    <root>/corpus.json        status; "complete" is false until every file is written

Field corpus layout:
    <root>/fields/<index>.png
    <root>/fields.jsonl       path, text, boxes, seed, style, kind, rule
    <root>/corpus.json
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import CorpusError
from ..imaging import GrayImage, read_png, write_png
from ..segment.box import Box
from ..utils import ProgressLogger, get_logger, iter_jsonl, ordered_map, read_json, write_json, write_jsonl
from .charset import CHARSET, CLASS_SETS
from .fields import sample_field
from .generator import CharSample, SyntheticGenerator
from .params import GenParams
from .rng import derive_seed, rng_for

PathLike = Union[str, Path]

MANIFEST_FILE = "manifest.jsonl"
FIELDS_FILE = "fields.jsonl"
STATUS_FILE = "corpus.json"


class CorpusSpec(BaseModel):
    """Which classes and how many samples per class and split."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    class_set: str = "all"
    classes: Optional[List[int]] = None
    splits: Dict[str, int] = Field(default_factory=lambda: {"train": 2000, "test": 200})

    @field_validator("class_set")
    @classmethod
    def _known_class_set(cls, value: str) -> str:
        if value not in CLASS_SETS:
            raise ValueError(f"unknown class set '{value}', expected one of {CLASS_SETS}")
        return value

    @field_validator("splits")
    @classmethod
    def _positive_counts(cls, value: Dict[str, int]) -> Dict[str, int]:
        if not value:
            raise ValueError("at least one split is required")
        bad = sorted(name for name, count in value.items() if count < 0)
        if bad:
            raise ValueError(f"negative sample counts for splits {bad}")
        return value

    def class_ids(self) -> List[int]:
        if self.classes is not None:
            return sorted(self.classes)
        return CHARSET.class_ids(self.class_set)


@dataclass(frozen=True)
class ManifestEntry:
    """One character sample of a corpus manifest."""

    path: str
    label: int
    seed: int
    split: str
    index: int
    provenance: str = "synthetic"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "class": self.label,
            "symbol": CHARSET.symbol(self.label),
            "seed": self.seed,
            "split": self.split,
            "index": self.index,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ManifestEntry":
        return cls(path=data["path"], label=int(data["class"]), seed=int(data["seed"]),
                   split=data["split"], index=int(data["index"]),
                   provenance=data.get("provenance", "synthetic"))


@dataclass(frozen=True)
class FieldRecord:
    """One rendered field with its ground truth."""

    path: str
    text: str
    boxes: List[Box]
    seed: int
    style: str
    kind: str = ""
    rule: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "text": self.text,
            "boxes": [b.to_list() for b in self.boxes],
            "seed": self.seed,
            "style": self.style,
            "kind": self.kind,
            "rule": self.rule,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FieldRecord":
        return cls(path=data["path"], text=data["text"],
                   boxes=[Box.from_list(b) for b in data["boxes"]],
                   seed=int(data["seed"]), style=data["style"],
                   kind=data.get("kind", ""), rule=data.get("rule"))

    def load_image(self, root: PathLike) -> GrayImage:
        return read_png(Path(root) / self.path)


def sample_seed(master_seed: int, split: str, class_id: int, index: int) -> int:
    return derive_seed(master_seed, split, class_id, index)


def generate_corpus(
    spec: CorpusSpec,
    params: GenParams,
    master_seed: int,
    root: PathLike,
    generator: SyntheticGenerator,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> List[ManifestEntry]:
    """
    Render every sample of spec under root and write the manifest.

    The status file is written as incomplete first, so an interrupted run
    is recognisable.
    """
    root = Path(root)
    logger = logger or get_logger("synthgen.corpus")
    root.mkdir(parents=True, exist_ok=True)
    write_json({"complete": False, "kind": "chars"}, root / STATUS_FILE)

    entries = [
        ManifestEntry(
            path=f"{split}/{class_id}/{index}.png",
            label=class_id,
            seed=sample_seed(master_seed, split, class_id, index),
            split=split,
            index=index,
        )
        for split in sorted(spec.splits)
        for class_id in spec.class_ids()
        for index in range(spec.splits[split])
    ]

    progress = ProgressLogger(logger, every=max(1, len(entries) // 20))
    progress.start_operation("generate_corpus", len(entries))

    def render(entry: ManifestEntry) -> ManifestEntry:
        sample = generator.render_char_sample(entry.label, params, entry.seed)
        write_png(sample.image, root / entry.path)
        progress.advance("generate_corpus", len(entries), entry.path)
        return entry

    written = ordered_map(render, entries, threads)
    write_jsonl((e.to_dict() for e in written), root / MANIFEST_FILE)
    write_json({
        "complete": True,
        "kind": "chars",
        "master_seed": master_seed,
        "style": params.style,
        "charset": CHARSET.hash,
        "samples": len(written),
        "splits": dict(sorted(spec.splits.items())),
        "classes": spec.class_ids(),
    }, root / STATUS_FILE)
    progress.complete_operation("generate_corpus", len(entries), len(written), root=str(root))
    return written


def regenerate_sample(entry: ManifestEntry, params: GenParams,
                      generator: SyntheticGenerator) -> CharSample:
    """Re-render one manifest entry in isolation from its recorded seed."""
    return generator.render_char_sample(entry.label, params, entry.seed)


def generate_field_corpus(
    name: str,
    count: int,
    params: GenParams,
    master_seed: int,
    root: PathLike,
    generator: SyntheticGenerator,
    class_set: str = "all",
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> List[FieldRecord]:
    """Render `count` random ID-style fields; seeds include the corpus name."""
    root = Path(root)
    logger = logger or get_logger("synthgen.corpus")
    root.mkdir(parents=True, exist_ok=True)
    write_json({"complete": False, "kind": "fields"}, root / STATUS_FILE)

    progress = ProgressLogger(logger, every=max(1, count // 20))
    progress.start_operation(f"generate_field_corpus[{name}]", count)

    def render(index: int) -> FieldRecord:
        seed = derive_seed(master_seed, "fields", name, index)
        kind, text, rule = sample_field(class_set, rng_for(seed, "text"))
        sample = generator.render_text_field(text, params, derive_seed(seed, "render"))
        path = f"fields/{index}.png"
        write_png(sample.image, root / path)
        progress.advance(f"generate_field_corpus[{name}]", count, path)
        return FieldRecord(path=path, text=text, boxes=sample.boxes, seed=seed,
                           style=params.style, kind=kind, rule=rule)

    records = ordered_map(render, range(count), threads)
    write_jsonl((r.to_dict() for r in records), root / FIELDS_FILE)
    write_json({
        "complete": True,
        "kind": "fields",
        "name": name,
        "master_seed": master_seed,
        "style": params.style,
        "class_set": class_set,
        "fields": len(records),
    }, root / STATUS_FILE)
    progress.complete_operation(f"generate_field_corpus[{name}]", count, len(records), root=str(root))
    return records


def _check_complete(root: Path) -> Dict[str, Any]:
    status_path = root / STATUS_FILE
    if not status_path.is_file():
        raise CorpusError(f"no corpus at {root}: {STATUS_FILE} missing")
    status = read_json(status_path)
    if not status.get("complete"):
        raise CorpusError(f"corpus at {root} is incomplete (interrupted generation?)")
    return status


def load_manifest(root: PathLike, split: Optional[str] = None) -> List[ManifestEntry]:
    """
    Read a complete character corpus manifest, optionally one split.

    Raises:
        CorpusError: missing, incomplete or unreadable corpus
    """
    root = Path(root)
    _check_complete(root)
    try:
        entries = [ManifestEntry.from_dict(r) for r in iter_jsonl(root / MANIFEST_FILE)]
    except (OSError, KeyError, ValueError) as e:
        raise CorpusError(f"unreadable manifest in {root}: {e}") from e
    if split is not None:
        entries = [e for e in entries if e.split == split]
    return entries


def load_field_corpus(root: PathLike) -> List[FieldRecord]:
    """
    Read a complete field corpus.

    Raises:
        CorpusError: missing, incomplete or unreadable corpus
    """
    root = Path(root)
    _check_complete(root)
    try:
        return [FieldRecord.from_dict(r) for r in iter_jsonl(root / FIELDS_FILE)]
    except (OSError, KeyError, ValueError) as e:
        raise CorpusError(f"unreadable field list in {root}: {e}") from e


def write_field_records(records: List[FieldRecord], root: PathLike) -> None:
    """Write a field list plus a complete status file (for hand-made corpora)."""
    root = Path(root)
    write_jsonl((r.to_dict() for r in records), root / FIELDS_FILE)
    write_json({"complete": True, "kind": "fields", "fields": len(records)}, root / STATUS_FILE)
