"""Detector sources: where the pipeline's boxes come from.

The fixture source returns an image's ground-truth label boxes at score 1.0
(standing in for the upstream localization network); the file source serves
stored detections, NMS-filtered and score-sorted.

Detections file format: one detection per line,
`<image-stem> <class-id> <score> <cx> <cy> <w> <h>`, whitespace-separated,
normalized coordinates, '#' comment lines ignored.
"""
from __future__ import annotations

from ..data.boxes import BoundingBox
from .nms import Detection, nms

DEFAULT_NMS_THRESHOLD = 0.45


class FixtureDetector:
    """Serves ground-truth boxes with score 1.0."""

    def __init__(self, boxes_by_id: dict[str, list[BoundingBox]]):
        self._boxes = boxes_by_id

    def detect(self, image_id: str) -> list[Detection]:
        return [Detection(image_id, b, 1.0) for b in self._boxes.get(image_id, [])]


class FileDetector:
    """Serves detections loaded from a detections file, keyed by image id."""

    def __init__(self, path, nms_threshold: float = DEFAULT_NMS_THRESHOLD,
                 known_ids=None):
        self._dets = parse_detections_file(path)
        self._nms_threshold = nms_threshold
        if known_ids is not None:
            unknown = set(self._dets) - set(known_ids)
            if unknown:
                raise ValueError(f"detections reference unknown image ids: {sorted(unknown)[:5]}")

    def detect(self, image_id: str) -> list[Detection]:
        dets = self._dets.get(image_id, [])
        return nms(dets, self._nms_threshold)


def parse_detections_file(path) -> dict[str, list[Detection]]:
    out: dict[str, list[Detection]] = {}
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 7:
                raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(fields)}")
            stem = fields[0]
            try:
                class_id = int(fields[1])
                score = float(fields[2])
                cx, cy, w, h = (float(v) for v in fields[3:])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric field in {line!r}") from None
            det = Detection(stem, BoundingBox(class_id, cx, cy, w, h), score)
            out.setdefault(stem, []).append(det)
    return out


def write_detections_file(path, dets: list[Detection]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for d in dets:
            b = d.box
            f.write(f"{d.image_id} {b.class_id} {d.score:.6f} "
                    f"{b.cx:.6f} {b.cy:.6f} {b.w:.6f} {b.h:.6f}\n")
