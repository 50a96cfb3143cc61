"""The four dataset presentations and the network input normalization."""
from __future__ import annotations

import enum

import numpy as np

from .clahe import ClaheConfig, clahe_channel, clahe_color
from .color import to_gray
from .image import ensure_image


class PreprocessVariant(enum.Enum):
    ORIGINAL = "original"
    CLAHE = "clahe"
    GRAY_THEN_CLAHE = "gray-clahe"
    CLAHE_THEN_GRAY = "clahe-gray"

    @property
    def output_channels(self) -> int:
        return 3 if self in (PreprocessVariant.ORIGINAL, PreprocessVariant.CLAHE) else 1

    @classmethod
    def parse(cls, name: str) -> "PreprocessVariant":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown preprocess variant {name!r} (expected one of: {valid})") from None


def preprocess(img: np.ndarray, variant: PreprocessVariant,
               cfg: ClaheConfig = ClaheConfig()) -> np.ndarray:
    img = ensure_image(img)
    if variant is PreprocessVariant.ORIGINAL:
        return img.copy()
    if variant is PreprocessVariant.CLAHE:
        return clahe_color(img, cfg)
    if variant is PreprocessVariant.GRAY_THEN_CLAHE:
        return clahe_channel(to_gray(img), cfg)
    if variant is PreprocessVariant.CLAHE_THEN_GRAY:
        return to_gray(clahe_color(img, cfg))
    raise ValueError(f"unhandled variant {variant!r}")


def normalize(img: np.ndarray) -> np.ndarray:
    """Pixels divided by 255 as float32, interleaved (H, W, C) -> planar (C, H, W)."""
    img = ensure_image(img)
    return np.ascontiguousarray(img.transpose(2, 0, 1).astype(np.float32) / np.float32(255.0))
