"""
Mini-batch SGD training, fine-tuning and evaluation.

Each mini-batch is cut into fixed-size gradient chunks; chunks may run in
the worker pool and their gradients are summed over a fixed pairwise tree,
so the trained tensors do not depend on the thread count.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import CorpusError, DivergenceError
from ..synthgen.rng import derive_seed, make_rng
from ..utils import ProgressLogger, get_logger, ordered_map
from .dataset import CharDataset
from .model import Model
from .network import Network, Params, empty_grads, init_params, tree_sum
from .spec import ModelSpec


class TrainConfig(BaseModel):
    """Optimizer and schedule settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = 10
    batch_size: int = 64
    learning_rate: float = 0.01
    lr_decay_at: List[float] = Field(default_factory=lambda: [0.5, 0.75])
    lr_decay_factor: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 5e-4
    seed: int = 0
    fine_tune: bool = False
    fine_tune_lr_scale: float = 0.1
    grad_chunk: int = 16

    @model_validator(mode="after")
    def _check(self) -> "TrainConfig":
        problems: List[str] = []
        if self.epochs < 0:
            problems.append("epochs must be non-negative")
        if self.batch_size < 1 or self.grad_chunk < 1:
            problems.append("batch_size and grad_chunk must be positive")
        if self.learning_rate <= 0 or self.fine_tune_lr_scale <= 0:
            problems.append("learning rates must be positive")
        if not 0.0 <= self.momentum < 1.0:
            problems.append("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            problems.append("weight_decay must be non-negative")
        if not 0.0 < self.lr_decay_factor <= 1.0:
            problems.append("lr_decay_factor must lie in (0, 1]")
        if any(not 0.0 < f < 1.0 for f in self.lr_decay_at):
            problems.append("lr_decay_at fractions must lie in (0, 1)")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def base_learning_rate(self) -> float:
        return self.learning_rate * (self.fine_tune_lr_scale if self.fine_tune else 1.0)

    def learning_rate_at(self, epoch: int) -> float:
        """Step schedule: decay once for every milestone epoch already reached."""
        milestones = [int(math.floor(f * self.epochs)) for f in self.lr_decay_at]
        passed = sum(1 for m in milestones if epoch >= m)
        return self.base_learning_rate() * self.lr_decay_factor ** passed


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    learning_rate: float
    train_loss: float
    train_accuracy: float
    test_accuracy: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epoch": self.epoch,
            "learning_rate": self.learning_rate,
            "train_loss": self.train_loss,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
        }


@dataclass(frozen=True)
class Evaluation:
    """Accuracy on a labeled dataset."""

    accuracy: float
    count: int
    per_class: Dict[int, float] = field(default_factory=dict)

    @property
    def class_wise_accuracy(self) -> float:
        """Unweighted mean of per-class accuracies."""
        return float(np.mean(list(self.per_class.values()))) if self.per_class else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "count": self.count,
            "class_wise_accuracy": self.class_wise_accuracy,
            "per_class": {str(k): v for k, v in sorted(self.per_class.items())},
        }


def evaluate(model: Model, dataset: CharDataset, batch_size: int = 256) -> Evaluation:
    """Overall and per-class accuracy of model on dataset."""
    if len(dataset) == 0:
        return Evaluation(accuracy=0.0, count=0)
    predicted = model.predict_arrays(dataset.images, batch_size)
    hits = predicted == dataset.labels
    per_class = {
        int(c): float(hits[dataset.labels == c].mean())
        for c in np.unique(dataset.labels)
    }
    return Evaluation(accuracy=float(hits.mean()), count=len(dataset), per_class=per_class)


def _normalization(images: np.ndarray) -> Tuple[float, float]:
    x = images.astype(np.float64) / 255.0
    std = float(x.std())
    return float(x.mean()), std if std > 1e-6 else 1.0


def _chunk_grads(network: Network, x: np.ndarray, labels: np.ndarray,
                 chunk: int, threads: int) -> Tuple[float, Params, int]:
    bounds = [(s, min(s + chunk, len(labels))) for s in range(0, len(labels), chunk)]
    parts = ordered_map(lambda b: network.loss_and_grads(x[b[0]:b[1]], labels[b[0]:b[1]]),
                        bounds, threads)
    loss = 0.0
    correct = 0
    for part_loss, _, part_correct in parts:
        loss += part_loss
        correct += part_correct
    return loss, tree_sum([p[1] for p in parts]), correct


def _sgd_step(params: Params, grads: Params, velocity: Params, count: int,
              lr: float, config: TrainConfig) -> None:
    scale = np.float32(1.0 / count)
    for name in sorted(params):
        g = grads[name] * scale
        if name.endswith(".weight") and config.weight_decay:
            g = g + np.float32(config.weight_decay) * params[name]
        velocity[name] = np.float32(config.momentum) * velocity[name] + g
        params[name] = params[name] - np.float32(lr) * velocity[name]


def _fit(model: Model, dataset: CharDataset, config: TrainConfig,
         test: Optional[CharDataset], threads: int,
         logger: logging.Logger) -> Tuple[Model, List[EpochRecord]]:
    params = {k: v.copy() for k, v in model.tensors.items()}
    history: List[EpochRecord] = []
    n = len(dataset)
    batch = min(config.batch_size, n)
    if batch < config.batch_size:
        logger.warning(f"batch size {config.batch_size} exceeds dataset size {n}; using {batch}")
    velocity = empty_grads(params)
    x_all = model.prepare(dataset.images)
    labels = dataset.labels

    progress = ProgressLogger(logger)
    progress.start_operation(f"train[{model.spec.name}]", config.epochs)
    for epoch in range(config.epochs):
        lr = config.learning_rate_at(epoch)
        order = make_rng(derive_seed(config.seed, "shuffle", epoch)).permutation(n)
        epoch_loss, epoch_correct = 0.0, 0
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            network = Network(model.spec, params)
            loss, grads, correct = _chunk_grads(network, x_all[idx], labels[idx],
                                                config.grad_chunk, threads)
            if not math.isfinite(loss):
                raise DivergenceError(epoch)
            epoch_loss += loss
            epoch_correct += correct
            _sgd_step(params, grads, velocity, len(idx), lr, config)

        trained = Model(spec=model.spec, tensors=params, charset_hash=model.charset_hash,
                        mean=model.mean, std=model.std, lineage=list(model.lineage))
        record = EpochRecord(
            epoch=epoch,
            learning_rate=lr,
            train_loss=epoch_loss / n,
            train_accuracy=epoch_correct / n,
            test_accuracy=evaluate(trained, test).accuracy if test is not None and len(test) else None,
        )
        history.append(record)
        progress.advance(f"train[{model.spec.name}]", config.epochs,
                         f"loss={record.train_loss:.4f} acc={record.train_accuracy:.4f}"
                         + (f" test={record.test_accuracy:.4f}" if record.test_accuracy is not None else ""))

    progress.complete_operation(f"train[{model.spec.name}]", config.epochs, config.epochs)
    final = Model(spec=model.spec, tensors=params, charset_hash=model.charset_hash,
                  mean=model.mean, std=model.std, lineage=list(model.lineage))
    return final, history


def train(spec_or_model: Union[ModelSpec, Model], dataset: CharDataset, config: TrainConfig,
          test: Optional[CharDataset] = None, threads: int = 1,
          logger: Optional[logging.Logger] = None) -> Tuple[Model, List[EpochRecord]]:
    """
    Train from scratch (given a spec) or continue from a model.

    Raises:
        CorpusError: empty dataset
        DivergenceError: the loss stopped being finite
    """
    logger = logger or get_logger("classify.train")
    if len(dataset) == 0:
        raise CorpusError("cannot train on an empty dataset")
    if isinstance(spec_or_model, Model):
        start = spec_or_model
        start.check_charset(dataset.charset_hash)
    else:
        mean, std = _normalization(dataset.images)
        params = init_params(spec_or_model, make_rng(derive_seed(config.seed, "init")))
        start = Model(spec=spec_or_model, tensors=params, charset_hash=dataset.charset_hash,
                      mean=mean, std=std, lineage=[])
    logger.info(f"Training {start.spec.name} on {len(dataset)} samples, "
                f"{len(dataset.classes())} classes, {config.epochs} epochs")
    return _fit(start, dataset, config, test, threads, logger)


def fine_tune(model: Model, dataset: CharDataset, config: TrainConfig, stage_id: str = "fine-tune",
              test: Optional[CharDataset] = None, threads: int = 1,
              logger: Optional[logging.Logger] = None) -> Tuple[Model, List[EpochRecord]]:
    """
    Continue training all weights from model at the reduced fine-tuning rate.

    The returned model's lineage gains stage_id; with zero epochs its tensors
    equal the input's.

    Raises:
        CharsetMismatchError: model and dataset charsets differ
    """
    model.check_charset(dataset.charset_hash)
    if not config.fine_tune:
        config = config.model_copy(update={"fine_tune": True})
    if config.epochs == 0:
        return model.with_lineage(stage_id), []
    tuned, history = train(model, dataset, config, test=test, threads=threads, logger=logger)
    return tuned.with_lineage(stage_id), history
