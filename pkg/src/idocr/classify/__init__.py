"""
Character classifiers: CNN specs, training, the HOG linear baseline and the model file.
"""

from .dataset import PATCHES_FILE, RECORDS_FILE, CharDataset
from .hog import HOG_LENGTH, LinearConfig, cross_validate_linear, hog_features, train_linear_baseline
from .model import Model, Prediction, forward, load_model, save_model
from .network import Network, cross_entropy, init_params, softmax, tree_sum
from .spec import PRESETS, LayerSpec, ModelSpec, cifarnet_like, hog_linear, lenet_like, preset
from .trainer import EpochRecord, Evaluation, TrainConfig, evaluate, fine_tune, train

__all__ = [
    "PATCHES_FILE",
    "RECORDS_FILE",
    "CharDataset",
    "HOG_LENGTH",
    "LinearConfig",
    "cross_validate_linear",
    "hog_features",
    "train_linear_baseline",
    "Model",
    "Prediction",
    "forward",
    "load_model",
    "save_model",
    "Network",
    "cross_entropy",
    "init_params",
    "softmax",
    "tree_sum",
    "PRESETS",
    "LayerSpec",
    "ModelSpec",
    "cifarnet_like",
    "hog_linear",
    "lenet_like",
    "preset",
    "EpochRecord",
    "Evaluation",
    "TrainConfig",
    "evaluate",
    "fine_tune",
    "train",
]
