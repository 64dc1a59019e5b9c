"""
Noise suppression on a binarized field.

All glyphs of a field are printed in one ink, while background blotches only
shift the paper tone by a bounded amount. Ink is therefore judged against
the darkest full-height component of the field, and speckle against the
field's glyph height, instead of fixed intensity or pixel thresholds.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..imaging import BinaryImage, GrayImage, border_median
from .config import SegmentConfig
from .contours import Component, trace_contours

# components at least this share of the tallest one set the ink reference
FULL_HEIGHT_SHARE = 0.8


@dataclass(frozen=True)
class InkReference:
    """Paper tone, glyph darkness below it and typical glyph height of a field."""

    background: float
    darkness: float
    height: float


def darkness(component: Component, gray: GrayImage, background: float) -> float:
    """How far the darkest tenth of the component's pixels lies below the paper tone."""
    box = component.box
    values = gray.data[box.y:box.y2, box.x:box.x2][component.mask]
    if values.size == 0:
        return 0.0
    return float(background - np.percentile(values, 10))


def ink_reference(components: Sequence[Component], gray: GrayImage,
                  background: float) -> Optional[InkReference]:
    """Reference from the full-height components; None without components."""
    if not components:
        return None
    tallest = max(c.box.h for c in components)
    full = [c for c in components if c.box.h >= FULL_HEIGHT_SHARE * tallest]
    return InkReference(
        background=float(background),
        darkness=max(darkness(c, gray, background) for c in full),
        height=float(np.median([c.box.h for c in full])),
    )


def _has_partner(component: Component, full: Sequence[Component], ratio: float) -> bool:
    box = component.box
    return any(
        other is not component
        and box.horizontal_overlap(other.box) >= ratio * min(box.w, other.box.w)
        for other in full
    )


def suppress_noise(binary: BinaryImage, gray: GrayImage,
                   config: Optional[SegmentConfig] = None,
                   background: Optional[float] = None) -> BinaryImage:
    """
    Binary image with background noise removed.

    Pixels lighter than ink_gate x the reference darkness are cleared, then
    whole components are dropped when their darkest pixels stay below
    min_contrast x the reference darkness, or when they are smaller than
    max(speckle_area, speckle_ratio x height^2) without a full-height
    component sharing their column span.

    Raises:
        ValueError: if the binary and gray images differ in size
    """
    if (binary.width, binary.height) != (gray.width, gray.height):
        raise ValueError("binary image and gray image must share dimensions")
    config = config or SegmentConfig()
    if background is None:
        background = border_median(gray)

    reference = ink_reference(trace_contours(binary), gray, background)
    if reference is None or reference.darkness <= 0:
        return binary

    level = reference.background - config.ink_gate * reference.darkness
    gated = binary.data & (gray.data.astype(np.float64) <= level)
    components = trace_contours(BinaryImage(gated))

    speckle = max(float(config.speckle_area), config.speckle_ratio * reference.height ** 2)
    full = [c for c in components if c.box.h >= config.small_height_ratio * reference.height]
    cleaned = np.zeros_like(gated)
    for component in components:
        if darkness(component, gray, reference.background) < config.min_contrast * reference.darkness:
            continue
        if component.area < speckle and not _has_partner(component, full, config.merge_overlap):
            continue
        box = component.box
        cleaned[box.y:box.y2, box.x:box.x2] |= component.mask
    return BinaryImage(cleaned)
