"""
Field recognition and format-rule post-processing.
"""

from .format_rules import Correction, FormatRule, Slot, apply_format_rule, load_rules, parse_pattern, parse_rules
from .recognizer import CharResult, FieldResult, assemble, recognize_corpus, recognize_field

__all__ = [
    "Correction",
    "FormatRule",
    "Slot",
    "apply_format_rule",
    "load_rules",
    "parse_pattern",
    "parse_rules",
    "CharResult",
    "FieldResult",
    "assemble",
    "recognize_corpus",
    "recognize_field",
]
