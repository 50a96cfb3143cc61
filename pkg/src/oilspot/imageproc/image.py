"""8-bit image conventions.

An image is a contiguous uint8 numpy array of shape (H, W, C) with C of 1
or 3, interleaved row-major.  C=3 means RGB; C=1 means luma.
"""
from __future__ import annotations

import numpy as np


def ensure_image(img: np.ndarray, channels=None) -> np.ndarray:
    if not isinstance(img, np.ndarray) or img.dtype != np.uint8:
        raise ValueError("image must be a uint8 numpy array")
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ValueError(f"image must be (H, W, C) with C in {{1, 3}}, got shape {img.shape}")
    if channels is not None and img.shape[2] != channels:
        raise ValueError(f"expected {channels}-channel image, got {img.shape[2]} channels")
    return np.ascontiguousarray(img)


def round_half_up(x: np.ndarray) -> np.ndarray:
    """Deterministic rounding: floor(x + 0.5)."""
    return np.floor(x + 0.5)


def to_u8(x: np.ndarray) -> np.ndarray:
    return np.clip(round_half_up(x), 0, 255).astype(np.uint8)
