"""
Architecture descriptors for the character classifiers.

A ModelSpec is an ordered list of layers over a 1 x 64 x 64 input (or a HOG
feature vector for the linear baseline). Shape inference runs at
construction, so an invalid stack never reaches training.
"""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from ..errors import ShapeMismatchError
from ..synthgen.charset import NUM_CLASSES
from .hog import HOG_LENGTH

LayerKind = Literal["conv", "relu", "maxpool", "fc", "softmax"]
Shape = Tuple[int, ...]


class LayerSpec(BaseModel):
    """One layer. Unused fields stay at their defaults."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: LayerKind
    out_channels: int = 0
    out_dim: int = 0
    kernel: int = 0
    stride: int = 1
    padding: int = 0

    @classmethod
    def conv(cls, out_channels: int, kernel: int, stride: int = 1, padding: int = 0) -> "LayerSpec":
        return cls(kind="conv", out_channels=out_channels, kernel=kernel, stride=stride, padding=padding)

    @classmethod
    def relu(cls) -> "LayerSpec":
        return cls(kind="relu")

    @classmethod
    def maxpool(cls, kernel: int = 2, stride: Optional[int] = None) -> "LayerSpec":
        return cls(kind="maxpool", kernel=kernel, stride=stride or kernel)

    @classmethod
    def fc(cls, out_dim: int) -> "LayerSpec":
        return cls(kind="fc", out_dim=out_dim)

    @classmethod
    def softmax(cls) -> "LayerSpec":
        return cls(kind="softmax")

    def output_shape(self, shape: Shape) -> Shape:
        if self.kind == "conv":
            if len(shape) != 3:
                raise ShapeMismatchError(f"conv expects a C x H x W input, got {shape}")
            if self.out_channels < 1 or self.kernel < 1 or self.stride < 1 or self.padding < 0:
                raise ShapeMismatchError(f"invalid conv parameters {self.model_dump()}")
            _, h, w = shape
            oh = (h + 2 * self.padding - self.kernel) // self.stride + 1
            ow = (w + 2 * self.padding - self.kernel) // self.stride + 1
            if oh < 1 or ow < 1:
                raise ShapeMismatchError(f"conv kernel {self.kernel} does not fit input {shape}")
            return (self.out_channels, oh, ow)
        if self.kind == "maxpool":
            if len(shape) != 3:
                raise ShapeMismatchError(f"maxpool expects a C x H x W input, got {shape}")
            if self.kernel < 1 or self.stride < 1:
                raise ShapeMismatchError(f"invalid maxpool parameters {self.model_dump()}")
            c, h, w = shape
            oh = (h - self.kernel) // self.stride + 1
            ow = (w - self.kernel) // self.stride + 1
            if oh < 1 or ow < 1:
                raise ShapeMismatchError(f"maxpool kernel {self.kernel} does not fit input {shape}")
            return (c, oh, ow)
        if self.kind == "fc":
            if self.out_dim < 1:
                raise ShapeMismatchError("fully connected layer needs out_dim >= 1")
            return (self.out_dim,)
        return shape


class ModelSpec(BaseModel):
    """Layer stack, input geometry and output dimension."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    layers: List[LayerSpec]
    features: Literal["pixels", "hog"] = "pixels"
    input_size: int = 64
    num_classes: int = NUM_CLASSES

    @model_validator(mode="after")
    def _infer(self) -> "ModelSpec":
        self.shapes()
        return self

    def input_shape(self) -> Shape:
        if self.features == "hog":
            return (HOG_LENGTH,)
        return (1, self.input_size, self.input_size)

    def shapes(self) -> List[Shape]:
        """Output shape of every layer, input shape first."""
        if not self.layers:
            raise ShapeMismatchError("model needs at least one layer")
        if self.layers[-1].kind != "softmax":
            raise ShapeMismatchError("the last layer must be softmax")
        if any(layer.kind == "softmax" for layer in self.layers[:-1]):
            raise ShapeMismatchError("softmax is only allowed as the last layer")
        shape = self.input_shape()
        shapes = [shape]
        for layer in self.layers:
            shape = layer.output_shape(shape)
            shapes.append(shape)
        if shape != (self.num_classes,):
            raise ShapeMismatchError(
                f"model '{self.name}' ends in shape {shape}, expected ({self.num_classes},)"
            )
        return shapes


def lenet_like(input_size: int = 64, num_classes: int = NUM_CLASSES) -> ModelSpec:
    return ModelSpec(
        name="lenet-like",
        input_size=input_size,
        num_classes=num_classes,
        layers=[
            LayerSpec.conv(6, 5), LayerSpec.relu(), LayerSpec.maxpool(2),
            LayerSpec.conv(16, 5), LayerSpec.relu(), LayerSpec.maxpool(2),
            LayerSpec.fc(120), LayerSpec.relu(),
            LayerSpec.fc(84), LayerSpec.relu(),
            LayerSpec.fc(num_classes), LayerSpec.softmax(),
        ],
    )


def cifarnet_like(input_size: int = 64, num_classes: int = NUM_CLASSES) -> ModelSpec:
    return ModelSpec(
        name="cifarnet-like",
        input_size=input_size,
        num_classes=num_classes,
        layers=[
            LayerSpec.conv(32, 5, padding=2), LayerSpec.relu(), LayerSpec.maxpool(2),
            LayerSpec.conv(32, 5, padding=2), LayerSpec.relu(), LayerSpec.maxpool(2),
            LayerSpec.conv(64, 5, padding=2), LayerSpec.relu(), LayerSpec.maxpool(2),
            LayerSpec.fc(64), LayerSpec.relu(),
            LayerSpec.fc(num_classes), LayerSpec.softmax(),
        ],
    )


def hog_linear(num_classes: int = NUM_CLASSES) -> ModelSpec:
    return ModelSpec(name="hog-linear", features="hog", num_classes=num_classes,
                     layers=[LayerSpec.fc(num_classes), LayerSpec.softmax()])


PRESETS = {
    "lenet-like": lenet_like,
    "cifarnet-like": cifarnet_like,
}


def preset(name: str, input_size: int = 64) -> ModelSpec:
    if name not in PRESETS:
        raise ValueError(f"unknown model preset '{name}', expected one of {sorted(PRESETS)}")
    return PRESETS[name](input_size=input_size)
