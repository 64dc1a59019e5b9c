"""
Segmentation parameters.
"""

from typing import List

from pydantic import BaseModel, ConfigDict, model_validator


class SegmentConfig(BaseModel):
    """Thresholds for binarization, line/string splitting and character extraction."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # binarization
    window: int = 25
    offset: int = 10

    # noise, as fractions of the field's ink darkness and glyph height
    ink_gate: float = 0.4
    min_contrast: float = 0.75
    speckle_ratio: float = 0.012

    # lines
    min_gap: int = 2
    noise_floor: float = 0.02
    min_line_ratio: float = 0.4

    # strings
    gap_factor: float = 2.5
    min_word_gap_ratio: float = 0.45

    # characters
    merge_overlap: float = 0.5
    speckle_area: int = 4
    small_height_ratio: float = 0.4
    oversize_ratio: float = 1.6
    valley_ratio: float = 0.15
    context_scale: float = 2.6

    @model_validator(mode="after")
    def _check(self) -> "SegmentConfig":
        problems: List[str] = []
        if self.window < 3 or self.window % 2 == 0:
            problems.append("window must be an odd pixel count >= 3")
        if not -128 <= self.offset <= 127:
            problems.append("offset must lie in [-128, 127]")
        if self.min_gap < 1:
            problems.append("min_gap must be at least 1 row")
        for name in ("noise_floor", "min_line_ratio", "merge_overlap", "small_height_ratio",
                     "valley_ratio", "ink_gate", "min_contrast", "speckle_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        for name in ("gap_factor", "oversize_ratio", "context_scale"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")
        if self.min_word_gap_ratio < 0 or self.speckle_area < 0:
            problems.append("min_word_gap_ratio and speckle_area must be non-negative")
        if problems:
            raise ValueError("; ".join(problems))
        return self
