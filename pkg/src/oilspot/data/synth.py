"""Deterministic synthetic dataset: a bright cylinder-like part on a textured
background, with high-saturation green stains on the part for anomaly
samples.  Every sample is rendered from its own (seed, split, class, index)
stream, so generation is order-independent and byte-reproducible.

Disk layout:
    images/<stem>.ppm     P6 frames
    labels/<stem>.txt     one tight box around the part per frame
    classes.csv           header then "<stem>,<Normal|Anomaly>" rows
    split.json            {"seed", "train", "val", "test"}
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .. import rng as rngmod
from ..imageproc.color import hsv_to_rgb
from ..imageproc.pnm import write_pnm
from .boxes import BoundingBox
from .labels import write_label_file
from .split import SplitManifest

NORMAL = "Normal"
ANOMALY = "Anomaly"
SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class SynthConfig:
    train: tuple[int, int] = (300, 300)   # (normal, anomaly) counts
    val: tuple[int, int] = (50, 50)
    test: tuple[int, int] = (50, 50)
    image_size: int = 160
    palette_seed: int = 0
    blob_intensity: tuple[int, int] = (100, 185)
    seed: int = 0

    def counts(self, split: str) -> tuple[int, int]:
        return getattr(self, split)

    def __post_init__(self) -> None:
        for split in SPLITS:
            n, a = self.counts(split)
            if n < 0 or a < 0:
                raise ValueError(f"negative counts for {split}: {(n, a)}")
        if self.image_size < 32:
            raise ValueError(f"image size too small: {self.image_size}")


def _smooth_noise(g, h, w, cell, lo, hi):
    coarse = g.uniform(lo, hi, size=(h // cell + 2, w // cell + 2))
    up = np.repeat(np.repeat(coarse, cell, 0), cell, 1)[:h, :w]
    k = cell  # two box-blur passes via cumulative sums
    for axis in (0, 1):
        c = np.cumsum(up, axis=axis)
        lead = np.take(c, range(k - 1, up.shape[axis]), axis=axis)
        lag = np.concatenate([np.zeros_like(np.take(c, [0], axis=axis)),
                              np.take(c, range(0, up.shape[axis] - k), axis=axis)], axis=axis)
        sl = (lead - lag) / k
        pad = up.shape[axis] - sl.shape[axis]
        up = np.concatenate([sl, np.take(sl, [-1] * pad, axis=axis)], axis=axis)
    return up


def render_sample(cfg: SynthConfig, split: str, anomalous: bool, index: int):
    """Render one frame.

    Returns (image, box, part_mask, blob_mask); blob_mask is all-False for
    normal samples.
    """
    size = cfg.image_size
    split_id = SPLITS.index(split)
    g = rngmod.stream(cfg.seed, rngmod.SYNTH, cfg.palette_seed, split_id, int(anomalous), index)

    # background: muted hue, low saturation, mid value, plus coarse texture
    hsv = np.zeros((size, size, 3), dtype=np.float64)
    hsv[:, :, 0] = g.uniform(0, 255)
    hsv[:, :, 1] = g.uniform(15, 60)
    hsv[:, :, 2] = np.clip(g.uniform(70, 150) + _smooth_noise(g, size, size, 8, -30, 30), 0, 255)
    img = hsv_to_rgb(np.clip(hsv, 0, 255).astype(np.uint8)).astype(np.float64)
    img += g.uniform(-6, 6, size=img.shape)

    # cylinder-like part: a shaded capsule around a random segment
    cx = g.uniform(0.35, 0.65) * size
    cy = g.uniform(0.35, 0.65) * size
    angle = g.uniform(0, np.pi)
    half_len = g.uniform(0.22, 0.34) * size
    radius = g.uniform(0.10, 0.15) * size
    ax, ay = np.cos(angle), np.sin(angle)
    ys, xs = np.mgrid[0:size, 0:size]
    px = xs + 0.5 - cx
    py = ys + 0.5 - cy
    t = np.clip(px * ax + py * ay, -half_len, half_len)
    dx = px - t * ax
    dy = py - t * ay
    dist = np.sqrt(dx * dx + dy * dy)
    part = dist <= radius

    part_hue = g.uniform(130, 180)
    part_sat = g.uniform(15, 55)
    part_val = g.uniform(185, 240)
    shade = 1.0 - 0.55 * (dist / radius) ** 2
    part_hsv = np.zeros((size, size, 3))
    part_hsv[:, :, 0] = part_hue
    part_hsv[:, :, 1] = part_sat
    part_hsv[:, :, 2] = np.clip(part_val * shade, 0, 255)
    part_rgb = hsv_to_rgb(np.clip(part_hsv, 0, 255).astype(np.uint8)).astype(np.float64)
    img[part] = part_rgb[part]

    blob_mask = np.zeros((size, size), dtype=bool)
    if anomalous:
        lo, hi = cfg.blob_intensity
        for _ in range(int(g.integers(1, 4))):
            bt = g.uniform(-0.75, 0.75) * half_len
            bo = g.uniform(-0.4, 0.4) * radius
            bx = cx + bt * ax - bo * ay
            by = cy + bt * ay + bo * ax
            ra = g.uniform(0.35, 0.65) * radius
            rb = g.uniform(0.35, 0.65) * radius
            rot = g.uniform(0, np.pi)
            ca, sa = np.cos(rot), np.sin(rot)
            ex = (xs + 0.5 - bx) * ca + (ys + 0.5 - by) * sa
            ey = -(xs + 0.5 - bx) * sa + (ys + 0.5 - by) * ca
            rho = np.sqrt((ex / ra) ** 2 + (ey / rb) ** 2)
            alpha = np.clip(1.4 - rho, 0.0, 1.0) * part
            stain_hsv = np.zeros((size, size, 3))
            stain_hsv[:, :, 0] = g.uniform(75, 100)           # fluorescent green
            stain_hsv[:, :, 1] = g.uniform(210, 255)
            stain_hsv[:, :, 2] = g.uniform(lo, hi)
            stain = hsv_to_rgb(np.clip(stain_hsv, 0, 255).astype(np.uint8)).astype(np.float64)
            a3 = alpha[:, :, None]
            img = a3 * stain + (1.0 - a3) * img
            blob_mask |= (alpha > 0.5)

    rows = np.flatnonzero(part.any(axis=1))
    cols = np.flatnonzero(part.any(axis=0))
    y0, y1 = int(rows[0]), int(rows[-1]) + 1
    x0, x1 = int(cols[0]), int(cols[-1]) + 1
    box = BoundingBox(0, (x0 + x1) / 2 / size, (y0 + y1) / 2 / size,
                      (x1 - x0) / size, (y1 - y0) / size)
    return np.clip(img, 0, 255).astype(np.uint8), box, part, blob_mask


def synth_generate(cfg: SynthConfig, out_dir) -> SplitManifest:
    """Write the full dataset to out_dir; byte-identical for equal configs."""
    img_dir = os.path.join(out_dir, "images")
    lbl_dir = os.path.join(out_dir, "labels")
    os.makedirs(img_dir, exist_ok=True)
    os.makedirs(lbl_dir, exist_ok=True)

    stems: dict[str, list[str]] = {s: [] for s in SPLITS}
    class_rows = []
    for split in SPLITS:
        n_normal, n_anomaly = cfg.counts(split)
        plan = [(False, i) for i in range(n_normal)] + [(True, i) for i in range(n_anomaly)]
        for anomalous, index in plan:
            tag = "a" if anomalous else "n"
            stem = f"{split}_{tag}{index:04d}"
            img, box, _, _ = render_sample(cfg, split, anomalous, index)
            write_pnm(os.path.join(img_dir, stem + ".ppm"), img)
            write_label_file(os.path.join(lbl_dir, stem + ".txt"), [box])
            stems[split].append(stem)
            class_rows.append((stem, ANOMALY if anomalous else NORMAL))

    with open(os.path.join(out_dir, "classes.csv"), "w", encoding="ascii", newline="\n") as f:
        f.write("stem,label\n")
        for stem, label in sorted(class_rows):
            f.write(f"{stem},{label}\n")
    manifest = SplitManifest(tuple(stems["train"]), tuple(stems["val"]),
                             tuple(stems["test"]), cfg.seed)
    with open(os.path.join(out_dir, "split.json"), "w", encoding="ascii", newline="\n") as f:
        f.write(manifest.to_json())
    return manifest
