"""
Stage datasets: mined and augmented patches merged with a shrinking synthetic share.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..classify.dataset import CharDataset
from ..classify.trainer import TrainConfig
from ..synthgen.generator import CharSample, SyntheticGenerator
from ..synthgen.params import GenParams
from ..synthgen.rng import derive_seed, make_rng
from ..utils import get_logger, ordered_map
from .augment import AugmentSpec, augment_to


def _fine_tune_default() -> TrainConfig:
    return TrainConfig(epochs=3, fine_tune=True)


class StageConfig(BaseModel):
    """Composition and fine-tuning settings shared by all bootstrap stages."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    stages: int = 4
    quota: int = 2000
    initial_share: float = 0.5
    share_floor: float = 0.05
    train_fraction: float = 0.9
    augment: AugmentSpec = Field(default_factory=AugmentSpec)
    fine_tune: TrainConfig = Field(default_factory=_fine_tune_default)

    @model_validator(mode="after")
    def _check(self) -> "StageConfig":
        problems: List[str] = []
        if self.stages < 1:
            problems.append("stages must be at least 1")
        if self.quota < 1:
            problems.append("quota must be positive")
        if not 0.0 <= self.share_floor <= self.initial_share <= 1.0:
            problems.append("shares must satisfy 0 <= share_floor <= initial_share <= 1")
        if not 0.0 < self.train_fraction < 1.0:
            problems.append("train_fraction must lie in (0, 1)")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def synthetic_share(self, stage: int) -> float:
        """Halved every stage; once below the floor it stays at the floor."""
        share = self.initial_share * 0.5 ** stage
        return share if share >= self.share_floor else self.share_floor


@dataclass
class StageDataset:
    train: CharDataset
    test: CharDataset
    composition: Dict[str, int]
    synthetic_share: float

    @property
    def size(self) -> int:
        return len(self.train) + len(self.test)


def _class_split(samples: List[CharSample], train_fraction: float,
                 seed: int) -> Tuple[List[CharSample], List[CharSample]]:
    order = make_rng(seed).permutation(len(samples))
    n_train = int(round(train_fraction * len(samples)))
    return [samples[i] for i in order[:n_train]], [samples[i] for i in order[n_train:]]


def build_stage_dataset(
    mined: Sequence[CharSample],
    stage: int,
    config: StageConfig,
    generator: SyntheticGenerator,
    params: GenParams,
    class_ids: Sequence[int],
    seed: int,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> StageDataset:
    """
    Fill every class up to the quota and split it class-wise into train/test.

    A class with mined patches gets round(share x quota) synthetic samples and
    the rest from its mined patches, augmented when too few were mined (a
    seeded subset when too many). A class without mined patches is entirely
    synthetic.
    """
    logger = logger or get_logger("bootstrap.dataset")
    share = config.synthetic_share(stage)
    by_class: Dict[int, List[CharSample]] = defaultdict(list)
    for sample in mined:
        by_class[sample.label].append(sample)

    train_parts: List[CharDataset] = []
    test_parts: List[CharDataset] = []
    for class_id in sorted(class_ids):
        real = by_class.get(class_id, [])
        n_synthetic = config.quota if not real else int(round(share * config.quota))
        n_real = config.quota - n_synthetic

        if len(real) >= n_real:
            pick = make_rng(derive_seed(seed, "stage", stage, "subset", class_id)).permutation(len(real))
            chosen = [real[i] for i in sorted(pick[:n_real].tolist())]
        else:
            chosen = list(real) + augment_to(real, n_real - len(real), config.augment,
                                             derive_seed(seed, "stage", stage, "augment", class_id))

        synthetic_seeds = [derive_seed(seed, "stage", stage, "synthetic", class_id, i)
                           for i in range(n_synthetic)]
        chosen += ordered_map(lambda s: generator.render_char_sample(class_id, params, s),
                              synthetic_seeds, threads)

        train, test = _class_split(chosen, config.train_fraction,
                                   derive_seed(seed, "stage", stage, "split", class_id))
        train_parts.append(CharDataset.from_samples(train, stage=stage, split="train"))
        test_parts.append(CharDataset.from_samples(test, stage=stage, split="test"))
        if not real:
            logger.debug(f"Stage {stage}: class {class_id} has no mined samples, fully synthetic")

    train_set = CharDataset.concat(train_parts)
    test_set = CharDataset.concat(test_parts)
    composition = Counter(r["provenance"] for r in train_set.records + test_set.records)
    composition_dict = {p: int(composition.get(p, 0)) for p in ("mined", "augmented", "synthetic")}
    logger.info(f"Stage {stage} dataset: {composition_dict} (synthetic share {share:g})")
    return StageDataset(train=train_set, test=test_set, composition=composition_dict,
                        synthetic_share=share)


def merged(stage_dataset: StageDataset) -> CharDataset:
    """Train and test rows in one dataset, train first."""
    return CharDataset.concat([stage_dataset.train, stage_dataset.test])

