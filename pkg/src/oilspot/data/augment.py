"""Label-aware image augmentation: rotation, zoom, shift, flips, brightness,
and 2x2 mosaic composition.

One parameter set is sampled per call in a fixed order (angle, zoom,
shift x, shift y, flip h, flip v, brightness), so the rng stream alignment
never depends on the config.  The affine warp rotates about the image
center in pixel space, samples bilinearly with reflected borders, and
transforms boxes as the axis-aligned hull of their four mapped corners.
Boxes keeping under 20% of their transformed area after clamping to the
unit square are dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..imageproc.image import ensure_image, to_u8
from .boxes import BoundingBox, box_from_corners


@dataclass(frozen=True)
class AugmentConfig:
    rotation_deg: float = 90.0        # angle ~ U(-r, r), capped to [-90, 90]
    zoom_range: float = 0.1           # scale ~ U(1-z, 1+z)
    shift_frac: float = 0.05          # shift ~ U(-s, s) of each dimension
    flip_h_prob: float = 0.5
    flip_v_prob: float = 0.5
    brightness_delta: float = 20.0    # additive ~ U(-b, b), clamped to [0, 255]

    def __post_init__(self) -> None:
        if not 0.0 <= self.rotation_deg <= 90.0:
            raise ValueError(f"rotation range must lie in [0, 90], got {self.rotation_deg}")
        if self.zoom_range < 0 or self.zoom_range >= 1:
            raise ValueError(f"zoom range must lie in [0, 1), got {self.zoom_range}")
        if self.shift_frac < 0:
            raise ValueError(f"shift range must be non-negative, got {self.shift_frac}")
        for p in (self.flip_h_prob, self.flip_v_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"flip probability must lie in [0, 1], got {p}")


IDENTITY = AugmentConfig(rotation_deg=0.0, zoom_range=0.0, shift_frac=0.0,
                         flip_h_prob=0.0, flip_v_prob=0.0, brightness_delta=0.0)

MIN_AREA_RETENTION = 0.2


def _reflect(idx: np.ndarray, n: int) -> np.ndarray:
    """Fold out-of-range indices back into [0, n-1], edge repeated."""
    idx = np.abs(idx)
    period = 2 * n
    idx = idx % period
    return np.where(idx >= n, period - 1 - idx, idx)


def _warp(img: np.ndarray, angle_deg: float, zoom: float, tx: float, ty: float) -> np.ndarray:
    h, w, c = img.shape
    cx, cy = w / 2.0, h / 2.0
    cos_t = math.cos(math.radians(angle_deg))
    sin_t = math.sin(math.radians(angle_deg))
    xs = np.arange(w, dtype=np.float64) + 0.5
    ys = np.arange(h, dtype=np.float64) + 0.5
    dx = (xs - cx - tx)[None, :]
    dy = (ys - cy - ty)[:, None]
    # inverse map: rotate by -angle, divide by zoom
    sx = (cos_t * dx + sin_t * dy) / zoom + cx - 0.5
    sy = (-sin_t * dx + cos_t * dy) / zoom + cy - 0.5
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    wx = (sx - x0)[:, :, None]
    wy = (sy - y0)[:, :, None]
    x0r, x1r = _reflect(x0, w), _reflect(x0 + 1, w)
    y0r, y1r = _reflect(y0, h), _reflect(y0 + 1, h)
    src = img.astype(np.float64)
    top = (1.0 - wx) * src[y0r, x0r] + wx * src[y0r, x1r]
    bot = (1.0 - wx) * src[y1r, x0r] + wx * src[y1r, x1r]
    return to_u8((1.0 - wy) * top + wy * bot)


def _transform_box(box: BoundingBox, angle_deg: float, zoom: float,
                   tx_frac: float, ty_frac: float, w: int, h: int) -> BoundingBox | None:
    cos_t = math.cos(math.radians(angle_deg))
    sin_t = math.sin(math.radians(angle_deg))
    x0, y0, x1, y1 = box.corners()
    pts = [(x0 * w, y0 * h), (x1 * w, y0 * h), (x0 * w, y1 * h), (x1 * w, y1 * h)]
    cx, cy = w / 2.0, h / 2.0
    out = []
    for px, py in pts:
        rx = (px - cx) * zoom
        ry = (py - cy) * zoom
        out.append((cx + cos_t * rx - sin_t * ry + tx_frac * w,
                    cy + sin_t * rx + cos_t * ry + ty_frac * h))
    nx0 = min(p[0] for p in out) / w
    nx1 = max(p[0] for p in out) / w
    ny0 = min(p[1] for p in out) / h
    ny1 = max(p[1] for p in out) / h
    hull = box_from_corners(box.class_id, nx0, ny0, nx1, ny1)
    clamped = hull.clamped()
    if clamped is None or hull.area() <= 0:
        return None
    if clamped.area() / hull.area() < MIN_AREA_RETENTION:
        return None
    return clamped


def augment(img: np.ndarray, boxes, cfg: AugmentConfig, rng) -> tuple[np.ndarray, list[BoundingBox]]:
    """Apply one sampled transform to an image and its boxes.

    With an all-zero config this is the identity on both, bit-exact.
    """
    img = ensure_image(img)
    boxes = list(boxes) if boxes is not None else []
    h, w, _ = img.shape

    angle = float(rng.uniform(-cfg.rotation_deg, cfg.rotation_deg))
    zoom = float(rng.uniform(1.0 - cfg.zoom_range, 1.0 + cfg.zoom_range))
    tx = float(rng.uniform(-cfg.shift_frac, cfg.shift_frac))
    ty = float(rng.uniform(-cfg.shift_frac, cfg.shift_frac))
    flip_h = bool(rng.random() < cfg.flip_h_prob)
    flip_v = bool(rng.random() < cfg.flip_v_prob)
    delta = float(rng.uniform(-cfg.brightness_delta, cfg.brightness_delta))

    if angle != 0.0 or zoom != 1.0 or tx != 0.0 or ty != 0.0:
        img = _warp(img, angle, zoom, tx * w, ty * h)
        boxes = [b for b in (_transform_box(bb, angle, zoom, tx, ty, w, h)
                             for bb in boxes) if b is not None]
    if flip_h:
        img = img[:, ::-1].copy()
        boxes = [BoundingBox(b.class_id, 1.0 - b.cx, b.cy, b.w, b.h) for b in boxes]
    if flip_v:
        img = img[::-1].copy()
        boxes = [BoundingBox(b.class_id, b.cx, 1.0 - b.cy, b.w, b.h) for b in boxes]
    if delta != 0.0:
        img = np.clip(img.astype(np.int16) + int(round(delta)), 0, 255).astype(np.uint8)
    return img, boxes


def flip_horizontal(img: np.ndarray, boxes) -> tuple[np.ndarray, list[BoundingBox]]:
    """Exact mirror; applying it twice restores pixels bit-for-bit."""
    img = ensure_image(img)
    out_boxes = [BoundingBox(b.class_id, 1.0 - b.cx, b.cy, b.w, b.h) for b in boxes]
    return img[:, ::-1].copy(), out_boxes


def flip_vertical(img: np.ndarray, boxes) -> tuple[np.ndarray, list[BoundingBox]]:
    img = ensure_image(img)
    out_boxes = [BoundingBox(b.class_id, b.cx, 1.0 - b.cy, b.w, b.h) for b in boxes]
    return img[::-1].copy(), out_boxes


def mosaic(samples, rng, out_size: tuple[int, int] | None = None,
           split_range: tuple[float, float] = (0.25, 0.75)):
    """Compose four (image, boxes) samples on a 2x2 grid at a random split.

    Each quadrant is the whole sample resized to fit; boxes are rescaled
    into quadrant coordinates and clamped.  Returns (image, boxes).
    """
    from ..imageproc.resize import resize_bilinear

    if len(samples) != 4:
        raise ValueError(f"mosaic needs exactly 4 samples, got {len(samples)}")
    imgs = [ensure_image(s[0]) for s in samples]
    channels = imgs[0].shape[2]
    if any(im.shape[2] != channels for im in imgs):
        raise ValueError("mosaic samples must share a channel count")
    if out_size is None:
        out_size = imgs[0].shape[:2]
    oh, ow = out_size
    lo, hi = split_range
    sy = int(round(oh * float(rng.uniform(lo, hi))))
    sx = int(round(ow * float(rng.uniform(lo, hi))))
    sy = min(max(sy, 1), oh - 1)
    sx = min(max(sx, 1), ow - 1)

    out = np.zeros((oh, ow, channels), dtype=np.uint8)
    regions = [  # (y0, x0, y1, x1) per quadrant: TL, TR, BL, BR
        (0, 0, sy, sx), (0, sx, sy, ow), (sy, 0, oh, sx), (sy, sx, oh, ow),
    ]
    out_boxes: list[BoundingBox] = []
    for (img, boxes), (y0, x0, y1, x1) in zip(samples, regions):
        qh, qw = y1 - y0, x1 - x0
        out[y0:y1, x0:x1] = resize_bilinear(ensure_image(img), qh, qw)
        for b in boxes:
            nb = BoundingBox(b.class_id,
                             (x0 + b.cx * qw) / ow, (y0 + b.cy * qh) / oh,
                             b.w * qw / ow, b.h * qh / oh).clamped()
            if nb is not None:
                out_boxes.append(nb)
    return out, out_boxes
