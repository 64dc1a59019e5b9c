"""
Format rules and constrained decoding.

A rule is a pattern with one slot per non-space character:

    9       digit
    A       uppercase letter
    a       lowercase letter
    L       any letter
    *       any symbol
    [xyz]   one of the listed symbols
    \\x     the literal symbol x

Spaces in a pattern are ignored; they only mirror the string gaps of the
field. Decoding picks, per position, the most probable symbol the slot
allows.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..errors import ConfigError
from ..synthgen.charset import CHARSET, DIGITS
from ..utils import get_logger, load_toml

PathLike = Union[str, Path]

_CLASS_TOKENS = {
    "9": tuple(CHARSET.ids(DIGITS)),
    "A": tuple(i for i, s in enumerate(CHARSET.symbols) if s.isupper()),
    "a": tuple(i for i, s in enumerate(CHARSET.symbols) if s.islower()),
    "L": tuple(i for i, s in enumerate(CHARSET.symbols) if s.isalpha()),
    "*": tuple(range(len(CHARSET))),
}


@dataclass(frozen=True)
class Slot:
    """Allowed class ids of one position, ascending; a literal slot allows one."""

    allowed: Tuple[int, ...]
    literal: bool = False

    def decode(self, probabilities: np.ndarray) -> int:
        if self.literal:
            return self.allowed[0]
        ids = np.asarray(self.allowed, dtype=np.int64)
        return int(ids[int(np.argmax(probabilities[ids]))])


@dataclass(frozen=True)
class Correction:
    position: int
    from_symbol: str
    to_symbol: str
    rule_id: str

    def to_dict(self) -> Dict[str, Any]:
        return {"position": self.position, "from": self.from_symbol,
                "to": self.to_symbol, "rule": self.rule_id}


@dataclass(frozen=True)
class FormatRule:
    rule_id: str
    pattern: str
    slots: Tuple[Slot, ...]

    @property
    def length(self) -> int:
        return len(self.slots)

    @classmethod
    def parse(cls, rule_id: str, pattern: str) -> "FormatRule":
        return cls(rule_id=rule_id, pattern=pattern, slots=tuple(parse_pattern(pattern)))


def _literal(symbol: str, pattern: str) -> Slot:
    if symbol not in CHARSET:
        raise ValueError(f"literal {symbol!r} in pattern {pattern!r} is not in the charset")
    return Slot(allowed=(CHARSET.id(symbol),), literal=True)


def parse_pattern(pattern: str) -> List[Slot]:
    """
    Raises:
        ValueError: unknown token, unterminated set, empty set or symbol outside the charset
    """
    slots: List[Slot] = []
    i = 0
    while i < len(pattern):
        token = pattern[i]
        if token == " ":
            i += 1
        elif token in _CLASS_TOKENS:
            slots.append(Slot(allowed=_CLASS_TOKENS[token]))
            i += 1
        elif token == "\\":
            if i + 1 >= len(pattern):
                raise ValueError(f"pattern {pattern!r} ends with a bare backslash")
            slots.append(_literal(pattern[i + 1], pattern))
            i += 2
        elif token == "[":
            end = pattern.find("]", i + 1)
            if end < 0:
                raise ValueError(f"unterminated symbol set in pattern {pattern!r}")
            members = pattern[i + 1:end]
            if not members:
                raise ValueError(f"empty symbol set in pattern {pattern!r}")
            unknown = [s for s in members if s not in CHARSET]
            if unknown:
                raise ValueError(f"symbols {unknown} in pattern {pattern!r} are not in the charset")
            slots.append(Slot(allowed=tuple(sorted(set(CHARSET.ids(members))))))
            i = end + 1
        else:
            raise ValueError(f"unknown token {token!r} in pattern {pattern!r} (escape literals with '\\')")
    if not slots:
        raise ValueError(f"pattern {pattern!r} has no slots")
    return slots


def apply_format_rule(
    probabilities: np.ndarray,
    rule: FormatRule,
    logger: Optional[logging.Logger] = None,
) -> Tuple[List[int], List[Correction]]:
    """
    Constrained argmax per position.

    Args:
        probabilities: N x num_classes matrix, one row per character
        rule: Rule whose slot count must equal N

    Returns:
        Decoded class ids and one correction per position that differs from
        the unconstrained argmax. A length mismatch leaves the decode
        unconstrained and logs a warning.
    """
    probabilities = np.asarray(probabilities)
    unconstrained = [int(np.argmax(row)) for row in probabilities]
    if len(probabilities) != rule.length:
        (logger or get_logger("ocr.rules")).warning(
            f"Rule '{rule.rule_id}' expects {rule.length} characters, got {len(probabilities)}; skipped"
        )
        return unconstrained, []

    decoded = [slot.decode(row) for slot, row in zip(rule.slots, probabilities)]
    corrections = [
        Correction(position=i, from_symbol=CHARSET.symbol(before),
                   to_symbol=CHARSET.symbol(after), rule_id=rule.rule_id)
        for i, (before, after) in enumerate(zip(unconstrained, decoded))
        if before != after
    ]
    return decoded, corrections


def parse_rules(table: Dict[str, Any]) -> Dict[str, FormatRule]:
    """
    Build rules from a mapping id -> pattern (or id -> {pattern = ...}).

    Raises:
        ConfigError: listing every invalid rule
    """
    rules: Dict[str, FormatRule] = {}
    problems: List[str] = []
    for rule_id, value in sorted(table.items()):
        pattern = value.get("pattern") if isinstance(value, dict) else value
        if not isinstance(pattern, str):
            problems.append(f"rules.{rule_id}: pattern must be a string")
            continue
        try:
            rules[rule_id] = FormatRule.parse(rule_id, pattern)
        except ValueError as e:
            problems.append(f"rules.{rule_id}: {e}")
    if problems:
        raise ConfigError(problems, "invalid format rules")
    return rules


def load_rules(path: PathLike) -> Dict[str, FormatRule]:
    """Read the [rules] table of a rules TOML file."""
    try:
        data = load_toml(path)
    except (OSError, ValueError) as e:
        raise ConfigError([f"{path}: {e}"], "cannot read format rules") from e
    return parse_rules(data.get("rules", {}))

