"""Bilinear resize with half-pixel sample centers; plain stretch, aspect
ratio not preserved.  Resizing to the source dimensions is a bit-exact copy."""
from __future__ import annotations

import numpy as np

from .image import ensure_image, to_u8


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    img = ensure_image(img)
    h, w, c = img.shape
    if out_h < 1 or out_w < 1:
        raise ValueError(f"target size must be positive, got {out_h}x{out_w}")
    if (out_h, out_w) == (h, w):
        return img.copy()
    fy = np.clip((np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5, 0.0, h - 1.0)
    fx = np.clip((np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5, 0.0, w - 1.0)
    y0 = np.floor(fy).astype(np.int64)
    x0 = np.floor(fx).astype(np.int64)
    wy = (fy - y0)[:, None, None]
    wx = (fx - x0)[None, :, None]
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    src = img.astype(np.float64)
    top = (1.0 - wx) * src[y0[:, None], x0[None, :]] + wx * src[y0[:, None], x1[None, :]]
    bot = (1.0 - wx) * src[y1[:, None], x0[None, :]] + wx * src[y1[:, None], x1[None, :]]
    return to_u8((1.0 - wy) * top + wy * bot)
