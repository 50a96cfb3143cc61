"""The end-to-end frame path: detect, crop, preprocess, resize, classify.

A frame with no detection is NoDetection and counts as a Normal prediction
in stream metrics (the alert only fires on classified anomalies); the
NoDetection tally is reported separately.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..detect.geometry import crop
from ..detect.nms import Detection
from ..imageproc.preprocess import normalize, preprocess
from ..imageproc.resize import resize_bilinear
from ..oilnet.checkpoint import Checkpoint
from ..oilnet.model import OilNet40, predict
from .config import PipelineConfig, validate_channels
from .metrics import ConfusionMatrix, confusion_and_metrics

NO_DETECTION = "NoDetection"
CLASSIFIED = "Classified"


@dataclass
class FrameResult:
    image_id: str
    status: str
    detection: Detection | None = None
    probability: float | None = None
    label: int | None = None           # 1 anomaly, 0 normal; None if no detection
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def predicted_label(self) -> int:
        """Stream-metric prediction: NoDetection counts as normal."""
        return self.label if self.label is not None else 0


@dataclass
class RunReport:
    frames: list[FrameResult]
    confusion: ConfusionMatrix | None
    n_labeled: int
    n_no_detection: int
    fps: float
    stage_seconds: dict[str, float]


class Pipeline:
    def __init__(self, cfg: PipelineConfig, detector, checkpoint: Checkpoint):
        validate_channels(cfg.variant, checkpoint.spec.input_channels)
        self.cfg = cfg
        self.detector = detector
        self.model: OilNet40 = checkpoint.build_model()

    def run_frame(self, image_id: str, image: np.ndarray) -> FrameResult:
        t0 = time.perf_counter()
        detections = self.detector.detect(image_id)
        t1 = time.perf_counter()
        if not detections:
            return FrameResult(image_id, NO_DETECTION, timings={"detect": t1 - t0})
        best = max(detections, key=lambda d: d.score)
        patch = crop(image, best.box, self.cfg.crop_margin)
        t2 = time.perf_counter()
        patch = preprocess(patch, self.cfg.variant, self.cfg.clahe)
        t3 = time.perf_counter()
        size = self.model.spec.input_size
        tensor = normalize(resize_bilinear(patch, size, size))
        t4 = time.perf_counter()
        prob, label = predict(self.model, tensor)
        t5 = time.perf_counter()
        return FrameResult(
            image_id, CLASSIFIED, detection=best, probability=prob, label=label,
            timings={"detect": t1 - t0, "crop": t2 - t1, "preprocess": t3 - t2,
                     "resize": t4 - t3, "classify": t5 - t4})

    def run_stream(self, frames, labels: dict[str, int] | None = None) -> RunReport:
        """frames: iterable of (image_id, image), processed strictly in order."""
        results: list[FrameResult] = []
        stage_seconds: dict[str, float] = {}
        start = time.perf_counter()
        for image_id, image in frames:
            r = self.run_frame(image_id, image)
            results.append(r)
            for k, v in r.timings.items():
                stage_seconds[k] = stage_seconds.get(k, 0.0) + v
        elapsed = time.perf_counter() - start
        fps = len(results) / elapsed if results and elapsed > 0 else 0.0
        confusion = None
        n_labeled = 0
        if labels is not None:
            tallied = [(r.predicted_label, labels[r.image_id])
                       for r in results if r.image_id in labels]
            n_labeled = len(tallied)
            confusion = confusion_and_metrics([p for p, _ in tallied],
                                              [y for _, y in tallied])
        n_no_detection = sum(1 for r in results if r.status == NO_DETECTION)
        return RunReport(results, confusion, n_labeled, n_no_detection, fps, stage_seconds)
