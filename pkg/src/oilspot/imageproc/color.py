"""Color-space conversions on 8-bit images.

Hue is quantized onto [0, 255] over [0, 360) degrees to keep full histogram
resolution; saturation and value live on [0, 255].  Grayscale uses the
BT.601 luma weights.
"""
from __future__ import annotations

import numpy as np

from .image import ensure_image, to_u8


def rgb_to_hsv(img: np.ndarray) -> np.ndarray:
    img = ensure_image(img, channels=3)
    rgb = img.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    c = mx - mn
    safe_c = np.where(c == 0, 1.0, c)
    hue = np.select(
        [c == 0, mx == r, mx == g],
        [0.0,
         60.0 * (((g - b) / safe_c) % 6.0),
         60.0 * ((b - r) / safe_c + 2.0)],
        default=60.0 * ((r - g) / safe_c + 4.0),
    )
    safe_mx = np.where(mx == 0, 1.0, mx)
    sat = np.where(mx == 0, 0.0, 255.0 * c / safe_mx)
    out = np.empty(img.shape, dtype=np.uint8)
    out[..., 0] = to_u8(hue * (255.0 / 360.0))
    out[..., 1] = to_u8(sat)
    out[..., 2] = mx.astype(np.uint8)
    return out


def hsv_to_rgb(img: np.ndarray) -> np.ndarray:
    img = ensure_image(img, channels=3)
    h = img[..., 0].astype(np.float64) * (360.0 / 255.0)
    s = img[..., 1].astype(np.float64) / 255.0
    v = img[..., 2].astype(np.float64) / 255.0
    c = v * s
    hp = h / 60.0
    x = c * (1.0 - np.abs(hp % 2.0 - 1.0))
    sector = np.floor(hp).astype(np.int64) % 6
    z = np.zeros_like(c)
    rp = np.choose(sector, [c, x, z, z, x, c])
    gp = np.choose(sector, [x, c, c, x, z, z])
    bp = np.choose(sector, [z, z, x, c, c, x])
    m = v - c
    out = np.empty(img.shape, dtype=np.uint8)
    out[..., 0] = to_u8((rp + m) * 255.0)
    out[..., 1] = to_u8((gp + m) * 255.0)
    out[..., 2] = to_u8((bp + m) * 255.0)
    return out


def to_gray(img: np.ndarray) -> np.ndarray:
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), shape (H, W, 1)."""
    img = ensure_image(img, channels=3)
    rgb = img.astype(np.float64)
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return to_u8(luma)[:, :, None]
