"""Axis-aligned integer pixel boxes, the shared geometry currency."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Box:
    """x, y is the top-left corner; w, h are strictly positive extents."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box extents must be positive, got w={self.w} h={self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains_point(self, fx: float, fy: float) -> bool:
        return self.x <= fx < self.x2 and self.y <= fy < self.y2

    def inside(self, width: int, height: int) -> bool:
        """True when the box lies fully inside a width x height raster."""
        return self.x >= 0 and self.y >= 0 and self.x2 <= width and self.y2 <= height

    def translate(self, dx: int, dy: int) -> "Box":
        return Box(self.x + dx, self.y + dy, self.w, self.h)

    def intersection_area(self, other: "Box") -> int:
        iw = min(self.x2, other.x2) - max(self.x, other.x)
        ih = min(self.y2, other.y2) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih

    @staticmethod
    def union_of(boxes) -> "Box":
        """Tight bounding box of a nonempty iterable of boxes."""
        boxes = list(boxes)
        if not boxes:
            raise ValueError("union_of requires at least one box")
        x = min(b.x for b in boxes)
        y = min(b.y for b in boxes)
        x2 = max(b.x2 for b in boxes)
        y2 = max(b.y2 for b in boxes)
        return Box(x, y, x2 - x, y2 - y)

    def to_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]

    @staticmethod
    def from_list(values) -> "Box":
        if len(values) != 4:
            raise ValueError(f"box needs [x, y, w, h], got {values!r}")
        return Box(int(values[0]), int(values[1]), int(values[2]), int(values[3]))
