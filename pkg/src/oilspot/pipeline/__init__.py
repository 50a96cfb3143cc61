from .metrics import ConfusionMatrix, confusion_and_metrics
from .config import ConfigError, PipelineConfig, parse_config_file, validate_channels
from .runner import CLASSIFIED, NO_DETECTION, FrameResult, Pipeline, RunReport
from .reports import (
    confusion_lines, format_confusion_table, render_eval_cls_report,
    render_run_report, stable_lines,
)

__all__ = [
    "ConfusionMatrix", "confusion_and_metrics",
    "ConfigError", "PipelineConfig", "parse_config_file", "validate_channels",
    "CLASSIFIED", "NO_DETECTION", "FrameResult", "Pipeline", "RunReport",
    "confusion_lines", "format_confusion_table", "render_eval_cls_report",
    "render_run_report", "stable_lines",
]
