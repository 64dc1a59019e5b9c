"""
The 74-symbol label alphabet and its class-id mapping.
"""

import hashlib
from typing import Dict, Iterable, List, Sequence, Tuple

DIGITS = "0123456789"
UPPERCASE = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
LOWERCASE = "abcdefghijklmnopqrstuvwxyz"
SPECIALS = "ßäöüÄÖÜ.-/()"

CLASS_SETS = ("all", "desk36")


class Charset:
    """Ordered symbol list with a bijective symbol <-> class-id index."""

    def __init__(self, symbols: Sequence[str]):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("charset symbols must be unique")
        for symbol in symbols:
            if len(symbol) != 1 or symbol.isspace():
                raise ValueError(f"invalid charset symbol {symbol!r}")
        self.symbols: Tuple[str, ...] = symbols
        self.index: Dict[str, int] = {s: i for i, s in enumerate(symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.index

    def id(self, symbol: str) -> int:
        return self.index[symbol]

    def symbol(self, class_id: int) -> str:
        return self.symbols[class_id]

    def ids(self, symbols: Iterable[str]) -> List[int]:
        return [self.index[s] for s in symbols]

    @property
    def hash(self) -> str:
        """Stable fingerprint recorded in model files."""
        return hashlib.sha256("".join(self.symbols).encode("utf-8")).hexdigest()[:16]

    def class_ids(self, class_set: str = "all") -> List[int]:
        """Class ids of a named subset: "all" or "desk36" (digits + uppercase)."""
        if class_set == "all":
            return list(range(len(self)))
        if class_set == "desk36":
            return self.ids(DIGITS + UPPERCASE)
        raise ValueError(f"unknown class set '{class_set}', expected one of {CLASS_SETS}")

    def subset_symbols(self, class_set: str = "all") -> str:
        return "".join(self.symbols[i] for i in self.class_ids(class_set))


CHARSET = Charset(DIGITS + UPPERCASE + LOWERCASE + SPECIALS)
NUM_CLASSES = len(CHARSET)
