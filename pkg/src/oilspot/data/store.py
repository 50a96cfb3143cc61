"""Reading the on-disk dataset layout (images/, labels/, classes.csv, split.json)."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..imageproc import load_image
from .boxes import BoundingBox
from .labels import read_label_file
from .split import SplitManifest
from .synth import ANOMALY, NORMAL


@dataclass
class Sample:
    stem: str
    image: np.ndarray
    boxes: list[BoundingBox]
    label: int | None  # 1 = anomaly, 0 = normal, None = unlabeled


class DatasetDir:
    """Lazy view over a dataset directory."""

    def __init__(self, root):
        self.root = str(root)
        self.images = os.path.join(self.root, "images")
        self.labels = os.path.join(self.root, "labels")
        if not os.path.isdir(self.images):
            raise FileNotFoundError(f"no images/ directory under {self.root}")
        self.classes = read_classes(os.path.join(self.root, "classes.csv"))
        split_path = os.path.join(self.root, "split.json")
        self.manifest = None
        if os.path.isfile(split_path):
            with open(split_path, "r", encoding="ascii") as f:
                self.manifest = SplitManifest.from_json(f.read())

    def image_path(self, stem: str) -> str:
        for ext in (".ppm", ".pgm", ".png"):
            p = os.path.join(self.images, stem + ext)
            if os.path.isfile(p):
                return p
        raise FileNotFoundError(f"no image for stem {stem!r} in {self.images}")

    def stems(self, split: str | None = None) -> list[str]:
        if split is not None:
            if self.manifest is None:
                raise ValueError(f"{self.root} has no split.json; cannot select split {split!r}")
            return list(getattr(self.manifest, split))
        names = sorted(os.listdir(self.images))
        return [os.path.splitext(n)[0] for n in names
                if os.path.splitext(n)[1] in (".ppm", ".pgm", ".png")]

    def load(self, stem: str) -> Sample:
        img = load_image(self.image_path(stem))
        boxes: list[BoundingBox] = []
        lbl_path = os.path.join(self.labels, stem + ".txt")
        if os.path.isfile(lbl_path):
            boxes = read_label_file(lbl_path)
        return Sample(stem, img, boxes, self.classes.get(stem))

    def load_split(self, split: str) -> list[Sample]:
        return [self.load(stem) for stem in self.stems(split)]


def read_classes(path) -> dict[str, int]:
    """Parse classes.csv into {stem: 0|1}; tolerates a header row."""
    if not os.path.isfile(path):
        return {}
    out: dict[str, int] = {}
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.lower() == "stem,label":
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'stem,label', got {line!r}")
            stem, label = parts[0].strip(), parts[1].strip()
            if label not in (NORMAL, ANOMALY):
                raise ValueError(f"{path}:{lineno}: unknown class label {label!r}")
            out[stem] = 1 if label == ANOMALY else 0
    return out
