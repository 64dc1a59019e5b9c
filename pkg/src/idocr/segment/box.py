"""
Axis-aligned pixel boxes.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple


@dataclass(frozen=True, order=True)
class Box:
    """x, y, w, h in pixels; w and h are at least 1."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box must have positive size, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def center(self) -> Tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def offset(self, dx: int, dy: int) -> "Box":
        return Box(self.x + dx, self.y + dy, self.w, self.h)

    def contains(self, other: "Box") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x2 <= self.x2 and other.y2 <= self.y2)

    def within(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x2 <= width and self.y2 <= height

    def union(self, other: "Box") -> "Box":
        x, y = min(self.x, other.x), min(self.y, other.y)
        return Box(x, y, max(self.x2, other.x2) - x, max(self.y2, other.y2) - y)

    def horizontal_overlap(self, other: "Box") -> int:
        return max(0, min(self.x2, other.x2) - max(self.x, other.x))

    def to_list(self) -> List[int]:
        return [self.x, self.y, self.w, self.h]

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "Box":
        x, y, w, h = (int(v) for v in values)
        return cls(x, y, w, h)

    @classmethod
    def from_corners(cls, x0: int, y0: int, x1: int, y1: int) -> "Box":
        """Half-open corners [x0, x1) x [y0, y1)."""
        return cls(x0, y0, max(1, x1 - x0), max(1, y1 - y0))
