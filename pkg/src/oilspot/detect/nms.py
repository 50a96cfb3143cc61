"""Greedy non-maximum suppression."""
from __future__ import annotations

from dataclasses import dataclass

from ..data.boxes import BoundingBox
from .geometry import iou


@dataclass(frozen=True)
class Detection:
    image_id: str
    box: BoundingBox
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must lie in [0, 1], got {self.score}")


def nms(dets: list[Detection], iou_threshold: float) -> list[Detection]:
    """Keep highest-score detections greedily; suppress any remaining one whose
    IoU with a kept detection exceeds the threshold.  Score ties keep the
    lower input index first; output is sorted by descending score."""
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    kept: list[int] = []
    for i in order:
        if all(iou(dets[i].box, dets[j].box) <= iou_threshold for j in kept):
            kept.append(i)
    return [dets[i] for i in kept]
