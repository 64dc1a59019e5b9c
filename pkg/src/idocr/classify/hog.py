"""
HOG features and the linear one-vs-rest baseline.

The baseline is a set of hinge-loss linear classifiers trained by SGD on
standardized HOG vectors; the regularization strength is chosen by k-fold
cross-validation before the final fit.
"""

import logging
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from skimage.feature import hog

from ..imaging import PATCH_SIDE, GrayImage
from ..synthgen.charset import NUM_CLASSES
from ..synthgen.rng import derive_seed, make_rng
from ..utils import get_logger, ordered_map

if TYPE_CHECKING:
    from .dataset import CharDataset
    from .model import Model

HOG_ORIENTATIONS = 9
HOG_CELL = 8
HOG_BLOCK = 2
HOG_LENGTH = 1764


def hog_features(patch: GrayImage) -> np.ndarray:
    """
    1,764-dim HOG descriptor of a 64x64 patch.

    9 unsigned orientation bins, 8x8-pixel cells, 2x2-cell blocks stepped by
    one cell (7 x 7 blocks), L2 block normalization.
    """
    if patch.data.shape != (PATCH_SIDE, PATCH_SIDE):
        raise ValueError(f"HOG expects a {PATCH_SIDE}x{PATCH_SIDE} patch, got {patch.data.shape}")
    features = hog(
        patch.data.astype(np.float64) / 255.0,
        orientations=HOG_ORIENTATIONS,
        pixels_per_cell=(HOG_CELL, HOG_CELL),
        cells_per_block=(HOG_BLOCK, HOG_BLOCK),
        block_norm="L2",
        feature_vector=True,
    )
    return features.astype(np.float32)


def hog_matrix(images: np.ndarray, threads: int = 1) -> np.ndarray:
    rows = ordered_map(lambda img: hog_features(GrayImage(img)), list(images), threads)
    if not rows:
        return np.zeros((0, HOG_LENGTH), dtype=np.float32)
    return np.stack(rows)


class LinearConfig(BaseModel):
    """SGD settings of the hinge-loss baseline."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = 15
    batch_size: int = 64
    learning_rate: float = 0.05
    regularization: List[float] = Field(default_factory=lambda: [1e-4, 1e-3, 1e-2])
    folds: int = 10
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "LinearConfig":
        problems = []
        if self.epochs < 1 or self.batch_size < 1:
            problems.append("epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            problems.append("learning_rate must be positive")
        if not self.regularization or any(r < 0 for r in self.regularization):
            problems.append("regularization needs at least one non-negative strength")
        if self.folds < 2:
            problems.append("folds must be at least 2")
        if problems:
            raise ValueError("; ".join(problems))
        return self


def _fit_hinge(features: np.ndarray, labels: np.ndarray, num_classes: int,
               strength: float, config: LinearConfig, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """One-vs-rest hinge loss with L2 penalty; returns (weight, bias)."""
    n, d = features.shape
    weight = np.zeros((num_classes, d), dtype=np.float64)
    bias = np.zeros(num_classes, dtype=np.float64)
    targets = -np.ones((n, num_classes), dtype=np.float64)
    targets[np.arange(n), labels] = 1.0
    batch = min(config.batch_size, n)

    for epoch in range(config.epochs):
        order = make_rng(derive_seed(seed, "hinge-epoch", epoch)).permutation(n)
        lr = config.learning_rate / (1.0 + epoch)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            x, t = features[idx], targets[idx]
            margins = t * (x @ weight.T + bias)
            active = (margins < 1.0).astype(np.float64) * t  # d(-hinge)/d(score)
            grad_w = -(active.T @ x) / len(idx) + strength * weight
            grad_b = -active.sum(axis=0) / len(idx)
            weight -= lr * grad_w
            bias -= lr * grad_b
    return weight, bias


def _standardize(features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std < 1e-6] = 1.0
    return mean, std


def cross_validate_linear(features: np.ndarray, labels: np.ndarray,
                          config: Optional[LinearConfig] = None,
                          folds: Optional[int] = None,
                          num_classes: int = NUM_CLASSES) -> Dict[float, float]:
    """Mean held-out accuracy for every candidate regularization strength."""
    config = config or LinearConfig()
    n = len(labels)
    k = min(folds or config.folds, n)
    if k < 2:
        return {float(r): 0.0 for r in config.regularization}
    order = make_rng(derive_seed(config.seed, "cv-folds")).permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) % k

    scores: Dict[float, float] = {}
    for strength in config.regularization:
        accuracies = []
        for fold in range(k):
            train_mask = assignment != fold
            mean, std = _standardize(features[train_mask])
            w, b = _fit_hinge((features[train_mask] - mean) / std, labels[train_mask],
                              num_classes, strength, config, derive_seed(config.seed, "cv", fold))
            held = (features[~train_mask] - mean) / std
            predicted = (held @ w.T + b).argmax(axis=1)
            accuracies.append(float((predicted == labels[~train_mask]).mean()))
        scores[float(strength)] = float(np.mean(accuracies))
    return scores


def train_linear_baseline(dataset: "CharDataset", config: Optional[LinearConfig] = None,
                          threads: int = 1,
                          logger: Optional[logging.Logger] = None) -> "Model":
    """
    Fit the HOG + linear model on a character dataset.

    The strength with the best cross-validated accuracy wins; ties go to the
    smaller strength.
    """
    from .model import Model
    from .spec import hog_linear

    config = config or LinearConfig()
    logger = logger or get_logger("classify.hog")
    spec = hog_linear()
    features = hog_matrix(dataset.images, threads).astype(np.float64)
    labels = dataset.labels

    scores = cross_validate_linear(features, labels, config, num_classes=spec.num_classes)
    best = min(scores, key=lambda s: (-scores[s], s))
    logger.info(f"Linear baseline cross-validation: {scores}, chosen strength {best}")

    mean, std = _standardize(features)
    weight, bias = _fit_hinge((features - mean) / std, labels, spec.num_classes, best,
                              config, derive_seed(config.seed, "final"))
    return Model(
        spec=spec,
        tensors={
            "linear.weight": weight,
            "linear.bias": bias,
            "features.mean": mean,
            "features.std": std,
        },
        charset_hash=dataset.charset_hash,
        lineage=[f"hog-linear:strength={best}"],
    )
