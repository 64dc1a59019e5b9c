"""
In-memory character datasets.

A dataset is a uint8 N x 64 x 64 array plus labels. It loads from a corpus
manifest or from a stage dataset directory (patches.npy + dataset.jsonl).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..errors import CorpusError
from ..imaging import GrayImage, read_png
from ..synthgen.charset import CHARSET
from ..synthgen.corpus import load_manifest
from ..synthgen.generator import CharSample
from ..utils import ordered_map, read_jsonl, write_jsonl

PathLike = Union[str, Path]

PATCHES_FILE = "patches.npy"
RECORDS_FILE = "dataset.jsonl"


@dataclass
class CharDataset:
    """Patches, labels and one metadata record per sample."""

    images: np.ndarray
    labels: np.ndarray
    records: List[Dict[str, Any]] = field(default_factory=list)
    charset_hash: str = CHARSET.hash

    def __post_init__(self) -> None:
        self.images = np.ascontiguousarray(self.images, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.ndim != 3 or len(self.images) != len(self.labels):
            raise CorpusError(
                f"dataset needs N x H x W images and N labels, got {self.images.shape} and {self.labels.shape}"
            )
        if not self.records:
            self.records = [{"class": int(label)} for label in self.labels]
        if len(self.records) != len(self.labels):
            raise CorpusError("dataset records and labels differ in length")

    def __len__(self) -> int:
        return len(self.labels)

    def classes(self) -> List[int]:
        return sorted(int(c) for c in np.unique(self.labels))

    def subset(self, indices: Sequence[int]) -> "CharDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return CharDataset(self.images[idx], self.labels[idx],
                           [self.records[i] for i in idx.tolist()], self.charset_hash)

    def where(self, **match: Any) -> "CharDataset":
        """Samples whose records carry every key/value in match."""
        keep = [i for i, r in enumerate(self.records)
                if all(r.get(k) == v for k, v in match.items())]
        return self.subset(keep)

    def class_counts(self) -> Dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    @classmethod
    def concat(cls, parts: Sequence["CharDataset"]) -> "CharDataset":
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty()
        hashes = {p.charset_hash for p in parts}
        if len(hashes) != 1:
            raise CorpusError("cannot concatenate datasets built for different charsets")
        return cls(np.concatenate([p.images for p in parts]),
                   np.concatenate([p.labels for p in parts]),
                   [r for p in parts for r in p.records], parts[0].charset_hash)

    @classmethod
    def empty(cls, side: int = 64) -> "CharDataset":
        return cls(np.zeros((0, side, side), dtype=np.uint8), np.zeros(0, dtype=np.int64), [])

    @classmethod
    def from_samples(cls, samples: Sequence[CharSample], **extra: Any) -> "CharDataset":
        if not samples:
            return cls.empty()
        images = np.stack([s.image.data for s in samples])
        labels = np.array([s.label for s in samples], dtype=np.int64)
        records = [{"class": s.label, "provenance": s.provenance, "seed": s.seed,
                    **({"field": s.field_seed} if s.field_seed is not None else {}), **extra}
                   for s in samples]
        return cls(images, labels, records)

    def to_samples(self) -> List[CharSample]:
        return [
            CharSample(image=GrayImage(self.images[i].copy()), label=int(self.labels[i]),
                       provenance=self.records[i].get("provenance", "synthetic"),
                       seed=int(self.records[i].get("seed", 0)),
                       field_seed=self.records[i].get("field"))
            for i in range(len(self))
        ]

    @classmethod
    def from_manifest(cls, root: PathLike, split: Optional[str] = None,
                      classes: Optional[Sequence[int]] = None, threads: int = 1) -> "CharDataset":
        """Load the PNGs of a character corpus, optionally one split and a class subset."""
        root = Path(root)
        entries = load_manifest(root, split)
        if classes is not None:
            wanted = set(classes)
            entries = [e for e in entries if e.label in wanted]
        images = ordered_map(lambda e: read_png(root / e.path).data, entries, threads)
        if not images:
            return cls.empty()
        return cls(np.stack(images), np.array([e.label for e in entries], dtype=np.int64),
                   [e.to_dict() for e in entries])

    def save(self, directory: PathLike) -> None:
        """Write patches.npy and dataset.jsonl (one record per row, with its index)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.save(directory / PATCHES_FILE, self.images, allow_pickle=False)
        write_jsonl(({**r, "index": i, "class": int(self.labels[i])} for i, r in enumerate(self.records)),
                    directory / RECORDS_FILE)

    @classmethod
    def load(cls, directory: PathLike) -> "CharDataset":
        directory = Path(directory)
        try:
            images = np.load(directory / PATCHES_FILE, allow_pickle=False)
            records = read_jsonl(directory / RECORDS_FILE)
        except (OSError, ValueError) as e:
            raise CorpusError(f"unreadable dataset in {directory}: {e}") from e
        records.sort(key=lambda r: r["index"])
        labels = np.array([r["class"] for r in records], dtype=np.int64)
        images = images[[r["index"] for r in records]] if records else images[:0]
        return cls(images, labels, records)
