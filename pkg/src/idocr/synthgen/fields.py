"""
Random, dictionary-free contents for ID-document text fields.

Each kind produces strings with the shape of a real field (a date, an ID
number, a name) from uniformly drawn symbols, so no bigram statistics leak
into the corpus. Kinds whose symbols are missing from the active class set
fall back to a spaced variant or are not offered at all.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .charset import CHARSET, DIGITS, UPPERCASE
from .rng import randint


@dataclass(frozen=True)
class _Alphabet:
    digits: str
    upper: str
    lower: str
    specials: str

    def has(self, symbols: str) -> bool:
        return all(s in self.specials for s in symbols)


def _alphabet(class_set: str) -> _Alphabet:
    symbols = CHARSET.subset_symbols(class_set)
    return _Alphabet(
        digits="".join(s for s in symbols if s in DIGITS),
        upper="".join(s for s in symbols if s.isupper()),
        lower="".join(s for s in symbols if s.islower()),
        specials="".join(s for s in symbols if not s.isalnum()),
    )


def _pick(rng: np.random.Generator, symbols: str, n: int) -> str:
    return "".join(symbols[int(i)] for i in rng.integers(len(symbols), size=n))


def _name(rng: np.random.Generator, ab: _Alphabet, lo: int, hi: int) -> str:
    """Capitalised word; all caps when the class set has no lowercase."""
    length = randint(rng, lo, hi)
    if not ab.lower:
        return _pick(rng, ab.upper, length)
    return _pick(rng, ab.upper, 1) + _pick(rng, ab.lower, length - 1)


def _date(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    day = randint(rng, 1, 28)
    month = randint(rng, 1, 12)
    year = randint(rng, 1930, 2009)
    if ab.has("."):
        return f"{day:02d}.{month:02d}.{year:04d}", "date"
    return f"{day:02d} {month:02d} {year:04d}", "date_spaced"


def _id_number(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    return _pick(rng, UPPERCASE, 1) + _pick(rng, DIGITS, 8), "id_number"


def _postal_code(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    return _pick(rng, DIGITS, 5), "postal_code"


def _surname(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    return _name(rng, ab, 4, 10), None


def _given_names(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    count = randint(rng, 1, 2)
    return " ".join(_name(rng, ab, 3, 8) for _ in range(count)), None


def _street(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    number = str(randint(rng, 1, 199))
    return f"{_name(rng, ab, 5, 12)} {number}", None


def _doc_code(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    return (f"{_pick(rng, UPPERCASE, 2)}-{_pick(rng, DIGITS, 3)}/{_pick(rng, DIGITS, 2)}",
            "doc_code")


def _place(rng: np.random.Generator, ab: _Alphabet) -> Tuple[str, Optional[str]]:
    return f"{_name(rng, ab, 4, 9)} ({_name(rng, ab, 3, 6)})", None


_Sampler = Callable[[np.random.Generator, _Alphabet], Tuple[str, Optional[str]]]

# kind -> (sampler, special symbols the kind cannot do without)
FIELD_KINDS: Dict[str, Tuple[_Sampler, str]] = {
    "date": (_date, ""),
    "id_number": (_id_number, ""),
    "postal_code": (_postal_code, ""),
    "surname": (_surname, ""),
    "given_names": (_given_names, ""),
    "street": (_street, ""),
    "doc_code": (_doc_code, "-/"),
    "place": (_place, "()"),
}


def available_kinds(class_set: str = "all") -> List[str]:
    ab = _alphabet(class_set)
    return [kind for kind, (_, needs) in FIELD_KINDS.items() if ab.has(needs)]


def sample_field_text(kind: str, class_set: str, rng: np.random.Generator) -> Tuple[str, Optional[str]]:
    """
    Draw one field text of the given kind.

    Returns:
        (text, rule id or None)
    """
    if kind not in FIELD_KINDS:
        raise ValueError(f"unknown field kind '{kind}', expected one of {sorted(FIELD_KINDS)}")
    sampler, needs = FIELD_KINDS[kind]
    ab = _alphabet(class_set)
    if not ab.has(needs):
        raise ValueError(f"field kind '{kind}' needs {needs!r}, absent from class set '{class_set}'")
    return sampler(rng, ab)


def sample_field(class_set: str, rng: np.random.Generator) -> Tuple[str, str, Optional[str]]:
    """Uniform kind, then its text. Returns (kind, text, rule id)."""
    kinds = available_kinds(class_set)
    kind = kinds[int(rng.integers(len(kinds)))]
    text, rule = sample_field_text(kind, class_set, rng)
    return kind, text, rule
