from .boxes import BoundingBox, box_from_corners
from .labels import (
    LabelFormatError, parse_label_text, write_label_text,
    read_label_file, write_label_file,
)
from .split import SplitManifest, split_dataset
from .augment import (
    AugmentConfig, IDENTITY, augment, flip_horizontal, flip_vertical, mosaic,
)
from .synth import ANOMALY, NORMAL, SynthConfig, render_sample, synth_generate
from .store import DatasetDir, Sample, read_classes

__all__ = [
    "BoundingBox", "box_from_corners",
    "LabelFormatError", "parse_label_text", "write_label_text",
    "read_label_file", "write_label_file",
    "SplitManifest", "split_dataset",
    "AugmentConfig", "IDENTITY", "augment", "flip_horizontal", "flip_vertical", "mosaic",
    "ANOMALY", "NORMAL", "SynthConfig", "render_sample", "synth_generate",
    "DatasetDir", "Sample", "read_classes",
]
