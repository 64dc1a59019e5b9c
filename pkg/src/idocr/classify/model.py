"""
Trained classifiers and the OCRM model file.

File layout, all integers u32 little endian:
    b"OCRM" | version | header length | header JSON (UTF-8, sorted keys)
    then per tensor, sorted by name:
    name length | name | rank | dims... | float32 LE data
"""

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ..errors import CharsetMismatchError, ModelFormatError, ShapeMismatchError
from ..imaging import PATCH_SIDE, GrayImage
from ..synthgen.charset import CHARSET
from .hog import hog_features
from .network import Network, softmax
from .spec import ModelSpec

MAGIC = b"OCRM"
FORMAT_VERSION = 1

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Prediction:
    """Argmax class (ties: lowest id) and the full probability vector."""

    class_id: int
    probabilities: np.ndarray

    @property
    def probability(self) -> float:
        return float(self.probabilities[self.class_id])

    @property
    def symbol(self) -> str:
        return CHARSET.symbol(self.class_id)


@dataclass
class Model:
    """Architecture, weights, input normalization and training lineage."""

    spec: ModelSpec
    tensors: Dict[str, np.ndarray]
    charset_hash: str = CHARSET.hash
    mean: float = 0.0
    std: float = 1.0
    lineage: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.tensors = {k: np.ascontiguousarray(v, dtype=np.float32) for k, v in self.tensors.items()}
        if self.spec.features == "pixels":
            # validates names and shapes against the ModelSpec
            Network(self.spec, self.tensors)

    @property
    def kind(self) -> str:
        return "hog-linear" if self.spec.features == "hog" else "cnn"

    def network(self) -> Network:
        return Network(self.spec, self.tensors)

    def with_lineage(self, stage_id: str) -> "Model":
        return replace(self, tensors=dict(self.tensors), lineage=[*self.lineage, stage_id])

    def check_charset(self, charset_hash: str) -> None:
        if charset_hash != self.charset_hash:
            raise CharsetMismatchError(
                f"model charset {self.charset_hash} does not match dataset charset {charset_hash}"
            )

    # ------------------------------------------------------------- inference

    def prepare(self, images: np.ndarray) -> np.ndarray:
        """uint8 N x 64 x 64 -> network input (pixels or standardized HOG)."""
        if images.ndim != 3:
            raise ShapeMismatchError(f"expected N x H x W patches, got shape {images.shape}")
        if self.spec.features == "hog":
            if images.shape[1:] != (PATCH_SIDE, PATCH_SIDE):
                raise ShapeMismatchError(f"HOG baseline expects 64x64 patches, got {images.shape[1:]}")
            feats = np.stack([hog_features(GrayImage(img)) for img in images]) if len(images) else \
                np.zeros((0, self.spec.input_shape()[0]), dtype=np.float32)
            return ((feats - self.tensors["features.mean"]) / self.tensors["features.std"]).astype(np.float32)
        side = self.spec.input_size
        if images.shape[1:] != (side, side):
            raise ShapeMismatchError(f"expected {side}x{side} patches, got {images.shape[1:]}")
        x = images.astype(np.float32)[:, None, :, :] / np.float32(255.0)
        return (x - np.float32(self.mean)) / np.float32(self.std)

    def logits(self, images: np.ndarray) -> np.ndarray:
        x = self.prepare(images)
        if self.spec.features == "hog":
            return x @ self.tensors["linear.weight"].T + self.tensors["linear.bias"]
        return self.network().logits(x)

    def probabilities(self, images: np.ndarray) -> np.ndarray:
        return softmax(self.logits(images).astype(np.float64))

    def forward(self, patch: GrayImage) -> Prediction:
        return self.predict_batch([patch])[0]

    def predict_batch(self, patches: Sequence[GrayImage], batch_size: int = 256) -> List[Prediction]:
        predictions: List[Prediction] = []
        for start in range(0, len(patches), batch_size):
            chunk = np.stack([p.data for p in patches[start:start + batch_size]])
            probs = self.probabilities(chunk)
            for row in probs:
                predictions.append(Prediction(class_id=int(np.argmax(row)), probabilities=row))
        return predictions

    def predict_arrays(self, images: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Argmax class ids for a uint8 N x 64 x 64 array."""
        out = np.zeros(len(images), dtype=np.int64)
        for start in range(0, len(images), batch_size):
            logits = self.logits(images[start:start + batch_size])
            out[start:start + len(logits)] = logits.argmax(axis=1)
        return out

    # ----------------------------------------------------------- persistence

    def header(self) -> Dict[str, Any]:
        return {
            "charset": self.charset_hash,
            "kind": self.kind,
            "lineage": list(self.lineage),
            "normalization": {"mean": self.mean, "std": self.std},
            "spec": self.spec.model_dump(mode="json"),
        }

    def to_bytes(self) -> bytes:
        header = json.dumps(self.header(), sort_keys=True, separators=(",", ":")).encode("utf-8")
        parts = [MAGIC, struct.pack("<II", FORMAT_VERSION, len(header)), header]
        for name in sorted(self.tensors):
            tensor = self.tensors[name]
            encoded = name.encode("utf-8")
            parts.append(struct.pack("<I", len(encoded)))
            parts.append(encoded)
            parts.append(struct.pack(f"<I{tensor.ndim}I", tensor.ndim, *tensor.shape))
            parts.append(tensor.astype("<f4").tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, payload: bytes) -> "Model":
        reader = _Reader(payload)
        if reader.take(4) != MAGIC:
            raise ModelFormatError("not a model file: bad magic")
        version = reader.u32()
        if version != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format version {version}")
        try:
            header = json.loads(reader.take(reader.u32()).decode("utf-8"))
            spec = ModelSpec.model_validate(header["spec"])
        except (ValueError, KeyError, ShapeMismatchError) as e:
            raise ModelFormatError(f"invalid model header: {e}") from e

        tensors: Dict[str, np.ndarray] = {}
        while not reader.done():
            name = reader.take(reader.u32()).decode("utf-8")
            rank = reader.u32()
            dims = tuple(reader.u32() for _ in range(rank))
            count = int(np.prod(dims)) if dims else 1
            data = np.frombuffer(reader.take(4 * count), dtype="<f4").astype(np.float32)
            tensors[name] = data.reshape(dims)

        norm = header.get("normalization", {})
        try:
            return cls(spec=spec, tensors=tensors, charset_hash=header["charset"],
                       mean=float(norm.get("mean", 0.0)), std=float(norm.get("std", 1.0)),
                       lineage=list(header.get("lineage", [])))
        except ShapeMismatchError as e:
            raise ModelFormatError(f"tensors do not match the stored spec: {e}") from e


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.payload):
            raise ModelFormatError("truncated model file")
        chunk = self.payload[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return int(struct.unpack("<I", self.take(4))[0])

    def done(self) -> bool:
        return self.pos >= len(self.payload)


def save_model(model: Model, path: PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(model.to_bytes())


def load_model(path: PathLike) -> Model:
    """
    Raises:
        ModelFormatError: unreadable or inconsistent file
    """
    try:
        payload = Path(path).read_bytes()
    except OSError as e:
        raise ModelFormatError(f"cannot read model file {path}: {e}") from e
    return Model.from_bytes(payload)


def forward(model: Model, patch: GrayImage) -> Prediction:
    return model.forward(patch)
