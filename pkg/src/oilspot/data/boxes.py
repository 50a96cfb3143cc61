"""Normalized bounding boxes: class id plus center/size in [0, 1]."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BoundingBox:
    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def corners(self) -> tuple[float, float, float, float]:
        """(x0, y0, x1, y1) in normalized coordinates."""
        return (self.cx - self.w / 2, self.cy - self.h / 2,
                self.cx + self.w / 2, self.cy + self.h / 2)

    def area(self) -> float:
        return self.w * self.h

    def clamped(self) -> "BoundingBox | None":
        """Intersect with the unit square; None if nothing remains."""
        x0, y0, x1, y1 = self.corners()
        x0, y0 = max(0.0, x0), max(0.0, y0)
        x1, y1 = min(1.0, x1), min(1.0, y1)
        if x1 <= x0 or y1 <= y0:
            return None
        return BoundingBox(self.class_id, (x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0)


def box_from_corners(class_id: int, x0: float, y0: float, x1: float, y1: float) -> BoundingBox:
    return BoundingBox(class_id, (x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0)
