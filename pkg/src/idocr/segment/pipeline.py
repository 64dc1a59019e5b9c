"""
Whole-field segmentation: binarize, suppress noise, split lines and strings, extract characters.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..imaging import GrayImage, binarize_adaptive, border_median
from .box import Box
from .chars import CharPatch, cut_patches, line_reference, locate_chars
from .config import SegmentConfig
from .noise import suppress_noise
from .projection import split_lines, split_strings


@dataclass(frozen=True)
class SegmentationResult:
    """
    Nested decomposition of a field in field coordinates.

    strings[i] are the string boxes of lines[i]; chars[i][j] the characters of
    strings[i][j], ordered by x.
    """

    lines: List[Box] = field(default_factory=list)
    strings: List[List[Box]] = field(default_factory=list)
    chars: List[List[List[CharPatch]]] = field(default_factory=list)

    @property
    def char_count(self) -> int:
        return sum(len(s) for line in self.chars for s in line)

    def flat_chars(self) -> List[CharPatch]:
        """Characters in reading order."""
        return [c for line in self.chars for s in line for c in s]

    def string_lengths(self) -> List[int]:
        return [len(s) for line in self.chars for s in line]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lines": [
                {
                    "box": line.to_list(),
                    "strings": [
                        {"box": s.to_list(), "chars": [c.box.to_list() for c in chars]}
                        for s, chars in zip(strings, char_lists)
                    ],
                }
                for line, strings, char_lists in zip(self.lines, self.strings, self.chars)
            ],
            "char_count": self.char_count,
        }


def segment_field(gray: GrayImage, config: Optional[SegmentConfig] = None) -> SegmentationResult:
    """Segment a cropped text-field image; a blank field yields an empty result."""
    config = config or SegmentConfig()
    background = border_median(gray)
    binary = suppress_noise(binarize_adaptive(gray, config.window, config.offset), gray, config,
                            background)

    lines = split_lines(binary, config.min_gap, config.noise_floor, config.min_line_ratio)
    all_strings: List[List[Box]] = []
    all_chars: List[List[List[CharPatch]]] = []
    kept_lines: List[Box] = []
    for line in lines:
        line_img = binary.crop(line.x, line.y, line.w, line.h)
        strings = [s.offset(line.x, line.y)
                   for s in split_strings(line_img, config.gap_factor, config.min_word_gap_ratio)]
        boxes_per_string = [
            [b.offset(s.x, s.y) for b in locate_chars(binary.crop(s.x, s.y, s.w, s.h), config)]
            for s in strings
        ]
        reference = line_reference([b for boxes in boxes_per_string for b in boxes], config)
        if reference is None:
            continue
        kept_lines.append(line)
        all_strings.append(strings)
        all_chars.append([cut_patches(boxes, gray, reference, config, background)
                          for boxes in boxes_per_string])

    return SegmentationResult(lines=kept_lines, strings=all_strings, chars=all_chars)
