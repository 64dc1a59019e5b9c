"""
Text-field decomposition into lines, strings and character patches.
"""

from .box import Box
from .chars import CharPatch, LineReference, cut_patches, extract_chars, line_reference, locate_chars
from .config import SegmentConfig
from .contours import Component, trace_contours
from .noise import InkReference, ink_reference, suppress_noise
from .pipeline import SegmentationResult, segment_field
from .projection import runs, split_lines, split_strings

__all__ = [
    "Box",
    "CharPatch",
    "LineReference",
    "cut_patches",
    "extract_chars",
    "line_reference",
    "locate_chars",
    "SegmentConfig",
    "Component",
    "trace_contours",
    "InkReference",
    "ink_reference",
    "suppress_noise",
    "SegmentationResult",
    "segment_field",
    "runs",
    "split_lines",
    "split_strings",
]
