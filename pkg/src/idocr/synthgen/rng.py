"""
Seeded randomness.

All generators are numpy PCG64 bit generators (PCG-XSL-RR 128/64), whose
output stream is documented and identical on every platform. Child seeds
are derived by hashing, so any sample can be regenerated in isolation.
"""

import hashlib
from typing import Union

import numpy as np

SeedPart = Union[int, str]


def derive_seed(*parts: SeedPart) -> int:
    """64-bit seed from blake2b over the textual form of the parts."""
    payload = "\x1f".join(f"{type(p).__name__}:{p}" for p in parts).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def rng_for(*parts: SeedPart) -> np.random.Generator:
    return make_rng(derive_seed(*parts))


def uniform(rng: np.random.Generator, low: float, high: float) -> float:
    if high <= low:
        return float(low)
    return float(rng.uniform(low, high))


def randint(rng: np.random.Generator, low: int, high: int) -> int:
    """Uniform integer in the CLOSED range [low, high]."""
    if high <= low:
        return int(low)
    return int(rng.integers(low, high + 1))
