"""
Self-supervised character bootstrapping: mining, augmentation, stage datasets and the stage loop.
"""

from .augment import (
    AugmentDraw,
    AugmentSpec,
    apply_augmentation,
    augment,
    augment_one,
    augment_to,
    draw_augmentation,
)
from .dataset_builder import StageConfig, StageDataset, build_stage_dataset, merged
from .manager import BootstrapManager, BootstrapResult, StageReport, run_bootstrap, stage_dir
from .miner import COUNT_MISMATCH, FieldMining, MiningResult, ground_truth_labels, mine_field, mine_patches

__all__ = [
    "AugmentDraw",
    "AugmentSpec",
    "apply_augmentation",
    "draw_augmentation",
    "augment",
    "augment_one",
    "augment_to",
    "StageConfig",
    "StageDataset",
    "build_stage_dataset",
    "merged",
    "BootstrapManager",
    "BootstrapResult",
    "StageReport",
    "run_bootstrap",
    "stage_dir",
    "COUNT_MISMATCH",
    "FieldMining",
    "MiningResult",
    "ground_truth_labels",
    "mine_field",
    "mine_patches",
]
