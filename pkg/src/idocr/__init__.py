"""
ID-document OCR with self-supervised character bootstrapping.

A classifier trained on synthetic characters reads text fields from identity
documents and bootstraps itself on fields with known ground truth: every
stage mines segmented characters, merges them with a shrinking share of
synthetic ones and fine-tunes the model.
"""

import os

# Numeric kernels run single-threaded; parallelism comes from the ordered worker pool.
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

__version__ = "1.0.0"
__author__ = "ID OCR Bootstrap"

from .bootstrap import BootstrapManager, StageConfig, run_bootstrap  # noqa: E402
from .classify import Model, load_model, save_model, train  # noqa: E402
from .config import RunConfig, load_config  # noqa: E402
from .ocr import recognize_field  # noqa: E402
from .segment import segment_field  # noqa: E402

__all__ = [
    "BootstrapManager",
    "StageConfig",
    "run_bootstrap",
    "Model",
    "load_model",
    "save_model",
    "train",
    "RunConfig",
    "load_config",
    "recognize_field",
    "segment_field",
    "__version__",
]
