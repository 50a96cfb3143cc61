"""Box geometry: intersection-over-union and pixel cropping."""
from __future__ import annotations

import math

import numpy as np

from ..data.boxes import BoundingBox
from ..imageproc.image import ensure_image


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection area / union area in normalized coordinates; disjoint -> 0.

    All areas derive from corner differences so identical boxes give exactly 1.
    """
    ax0, ay0, ax1, ay1 = a.corners()
    bx0, by0, bx1, by1 = b.corners()
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter
    return inter / union if union > 0.0 else 0.0


def crop(img: np.ndarray, box: BoundingBox, margin_frac: float = 0.0) -> np.ndarray:
    """Pixel rectangle for a normalized box expanded by margin_frac per side.

    Min corner floors, max corner ceils (the rectangle always covers the
    box); the result is clamped to the image and never smaller than 1x1.
    """
    img = ensure_image(img)
    h, w, _ = img.shape
    x0n, y0n, x1n, y1n = box.corners()
    mx = margin_frac * box.w
    my = margin_frac * box.h
    x0 = math.floor((x0n - mx) * w)
    y0 = math.floor((y0n - my) * h)
    x1 = math.ceil((x1n + mx) * w)
    y1 = math.ceil((y1n + my) * h)
    x0 = min(max(x0, 0), w - 1)
    y0 = min(max(y0, 0), h - 1)
    x1 = min(max(x1, x0 + 1), w)
    y1 = min(max(y1, y0 + 1), h)
    return img[y0:y1, x0:x1].copy()
