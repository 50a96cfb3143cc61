from .geometry import iou, crop
from .nms import Detection, nms
from .evalmap import DEFAULT_THRESHOLDS, DetEvalResult, map_eval
from .sources import (
    DEFAULT_NMS_THRESHOLD, FixtureDetector, FileDetector,
    parse_detections_file, write_detections_file,
)

__all__ = [
    "iou", "crop", "Detection", "nms",
    "DEFAULT_THRESHOLDS", "DetEvalResult", "map_eval",
    "DEFAULT_NMS_THRESHOLD", "FixtureDetector", "FileDetector",
    "parse_detections_file", "write_detections_file",
]
