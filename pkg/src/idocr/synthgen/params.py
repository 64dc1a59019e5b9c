"""
Generator parameters.

One GenParams instance describes a rendering style. Two presets ship: the
`source` style used for pre-training characters and the lower-contrast,
slightly blurred `pseudo_real` style that stands in for scanned documents.
"""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

IntRange = Tuple[int, int]
FloatRange = Tuple[float, float]

MAX_ROTATION_DEG = 10.0


class GenParams(BaseModel):
    """Rendering style for characters and text fields."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    style: str = "source"
    font_pool: str = "source"

    background_range: IntRange = (160, 250)
    ink_range: IntRange = (0, 60)
    blotch_count_range: IntRange = (0, 12)
    blotch_radius_range: IntRange = (1, 4)
    blotch_delta: int = 40
    blur_range: FloatRange = (0.0, 0.0)

    font_size_range: IntRange = (28, 40)
    rotation_range: FloatRange = (-3.0, 3.0)
    translation_range: FloatRange = (-4.0, 4.0)
    neighbor_gap_range: IntRange = (2, 8)

    # text-field layout
    field_rotation_range: FloatRange = (-1.0, 1.0)
    tracking_range: IntRange = (1, 3)
    word_gap_range: IntRange = (18, 26)
    line_gap_range: IntRange = (6, 12)
    field_margin: int = 12

    @model_validator(mode="after")
    def _check_ranges(self) -> "GenParams":
        problems: List[str] = []
        for name in (
            "background_range", "ink_range", "blotch_count_range", "blotch_radius_range",
            "blur_range", "font_size_range", "rotation_range", "translation_range",
            "neighbor_gap_range", "field_rotation_range", "tracking_range",
            "word_gap_range", "line_gap_range",
        ):
            low, high = getattr(self, name)
            if low > high:
                problems.append(f"{name} is empty: {low} > {high}")
        for name in ("background_range", "ink_range"):
            low, high = getattr(self, name)
            if low < 0 or high > 255:
                problems.append(f"{name} must lie within [0, 255]")
        for name in ("rotation_range", "field_rotation_range"):
            low, high = getattr(self, name)
            if low < -MAX_ROTATION_DEG or high > MAX_ROTATION_DEG:
                problems.append(f"{name} must lie within [-10, 10] degrees")
        if self.ink_range[1] >= self.background_range[0]:
            problems.append("ink_range must be darker than background_range")
        if self.font_size_range[0] < 6:
            problems.append("font_size_range must start at 6 pt or more")
        if self.blotch_radius_range[0] < 1:
            problems.append("blotch_radius_range must start at 1 px or more")
        if self.blotch_count_range[0] < 0 or self.blotch_delta < 0:
            problems.append("blotch counts and blotch_delta must be non-negative")
        if self.blur_range[0] < 0:
            problems.append("blur_range must be non-negative")
        if self.field_margin < 0:
            problems.append("field_margin must be non-negative")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @classmethod
    def source(cls) -> "GenParams":
        return cls()

    @classmethod
    def pseudo_real(cls) -> "GenParams":
        return cls(
            style="pseudo_real",
            font_pool="pseudo_real",
            background_range=(120, 200),
            ink_range=(20, 90),
            blur_range=(0.0, 0.6),
        )
