"""
Affine and gray-value augmentation of mined patches.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..imaging import AffineTransform, GrayImage, border_median, warp_affine
from ..synthgen.generator import CharSample
from ..synthgen.rng import derive_seed, make_rng, uniform

FloatRange = Tuple[float, float]

MAX_SHEAR_DEG = 20.0


class AugmentSpec(BaseModel):
    """Ranges each augmentation draws from, uniformly and independently."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    rotation_range: FloatRange = (-3.0, 3.0)
    translation_range: FloatRange = (-3.0, 3.0)
    scale_range: FloatRange = (0.9, 1.1)
    shear_range: FloatRange = (-5.0, 5.0)
    gain_range: FloatRange = (0.8, 1.2)
    bias_range: FloatRange = (-20.0, 20.0)

    @model_validator(mode="after")
    def _check(self) -> "AugmentSpec":
        problems: List[str] = []
        for name in ("rotation_range", "translation_range", "scale_range", "shear_range",
                     "gain_range", "bias_range"):
            low, high = getattr(self, name)
            if low > high:
                problems.append(f"{name} is empty: {low} > {high}")
        if self.scale_range[0] <= 0 or self.gain_range[0] <= 0:
            problems.append("scale_range and gain_range must be positive")
        if self.shear_range[0] < -MAX_SHEAR_DEG or self.shear_range[1] > MAX_SHEAR_DEG:
            problems.append(f"shear_range must lie within [-{MAX_SHEAR_DEG:g}, {MAX_SHEAR_DEG:g}] degrees")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @classmethod
    def identity(cls) -> "AugmentSpec":
        return cls(rotation_range=(0.0, 0.0), translation_range=(0.0, 0.0),
                   scale_range=(1.0, 1.0), shear_range=(0.0, 0.0),
                   gain_range=(1.0, 1.0), bias_range=(0.0, 0.0))


@dataclass(frozen=True)
class AugmentDraw:
    """Parameters of one augmentation."""

    angle: float
    dx: float
    dy: float
    scale: float
    shear: float
    gain: float
    bias: float

    @property
    def moves_pixels(self) -> bool:
        return (self.angle, self.dx, self.dy, self.scale, self.shear) != (0.0, 0.0, 0.0, 1.0, 0.0)

    @property
    def changes_gray(self) -> bool:
        return (self.gain, self.bias) != (1.0, 0.0)


def draw_augmentation(spec: AugmentSpec, seed: int) -> AugmentDraw:
    rng = make_rng(seed)
    return AugmentDraw(
        angle=uniform(rng, *spec.rotation_range),
        dx=uniform(rng, *spec.translation_range),
        dy=uniform(rng, *spec.translation_range),
        scale=uniform(rng, *spec.scale_range),
        shear=uniform(rng, *spec.shear_range),
        gain=uniform(rng, *spec.gain_range),
        bias=uniform(rng, *spec.bias_range),
    )


def apply_augmentation(image: GrayImage, draw: AugmentDraw) -> GrayImage:
    """Warp about the patch centre, filling with the border tone, then map gray values."""
    if draw.moves_pixels:
        center = ((image.width - 1) / 2.0, (image.height - 1) / 2.0)
        transform = AffineTransform.affine(draw.angle, draw.scale, draw.shear, draw.dx, draw.dy, center)
        image = warp_affine(image, transform, fill=border_median(image))
    if draw.changes_gray:
        values = np.rint(image.data.astype(np.float64) * draw.gain + draw.bias)
        image = GrayImage(np.clip(values, 0, 255).astype(np.uint8))
    return image


def augment_one(sample: CharSample, spec: AugmentSpec, seed: int) -> CharSample:
    """One augmented copy of sample; the label is kept and pixels stay in [0, 255]."""
    image = apply_augmentation(sample.image, draw_augmentation(spec, seed))
    return CharSample(image=image, label=sample.label, provenance="augmented", seed=seed,
                      field_seed=sample.field_seed)


def augment(samples: Sequence[CharSample], spec: AugmentSpec, seed: int) -> List[CharSample]:
    """One augmented copy per input, deterministic for a given seed."""
    return [augment_one(s, spec, derive_seed(seed, "augment", i)) for i, s in enumerate(samples)]


def augment_to(samples: Sequence[CharSample], count: int, spec: AugmentSpec,
               seed: int) -> List[CharSample]:
    """count augmented copies, cycling over samples in order."""
    if not samples:
        return []
    return [augment_one(samples[i % len(samples)], spec, derive_seed(seed, "augment", i))
            for i in range(count)]
