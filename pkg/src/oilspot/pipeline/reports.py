"""Structured-text reports with a deterministic body.

Layout contract (versioned by the `report:` header): deterministic
`key value` lines first; one `generated: <timestamp>` line; volatile values
(wall-clock timings, fps) live below the trailing `[timing]` marker.  Two
runs on identical inputs produce byte-identical bodies: compare with
`stable_lines`.
"""
from __future__ import annotations

import datetime

from .metrics import ConfusionMatrix
from .runner import RunReport


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def stable_lines(text: str) -> str:
    """The deterministic part of a report: everything above `[timing]`,
    minus the `generated:` line."""
    lines = []
    for line in text.splitlines():
        if line.strip() == "[timing]":
            break
        if line.startswith("generated:"):
            continue
        lines.append(line)
    return "\n".join(lines) + "\n"


def confusion_lines(prefix: str, cm: ConfusionMatrix) -> list[str]:
    return [
        f"{prefix} tp {cm.tp} fp {cm.fp} fn {cm.fn} tn {cm.tn}",
        f"{prefix} accuracy {cm.accuracy!r} precision {cm.precision!r} recall {cm.recall!r}",
    ]


def render_run_report(report: RunReport) -> str:
    lines = ["report: stream/v1", f"generated: {_now()}"]
    lines.append(f"frames {len(report.frames)}")
    lines.append(f"labeled {report.n_labeled}")
    lines.append(f"no_detection {report.n_no_detection}")
    if report.confusion is not None:
        lines += confusion_lines("confusion", report.confusion)
    for r in report.frames:
        prob = "-" if r.probability is None else repr(r.probability)
        label = "-" if r.label is None else str(r.label)
        lines.append(f"frame {r.image_id} {r.status} {prob} {label}")
    lines.append("[timing]")
    lines.append(f"fps {report.fps!r}")
    for k in sorted(report.stage_seconds):
        lines.append(f"stage_seconds {k} {report.stage_seconds[k]!r}")
    return "\n".join(lines) + "\n"


def render_eval_cls_report(rows: list[tuple[str, str, ConfusionMatrix]]) -> str:
    """rows: (variant name, checkpoint path, confusion matrix)."""
    lines = ["report: eval-cls/v1", f"generated: {_now()}"]
    for variant, ckpt_path, cm in rows:
        lines.append(f"variant {variant} checkpoint {ckpt_path}")
        lines += confusion_lines(f"variant {variant}", cm)
    return "\n".join(lines) + "\n"


def format_confusion_table(cm: ConfusionMatrix) -> str:
    return (
        "              predicted\n"
        "               Anomaly  Normal\n"
        f"actual Anomaly {cm.tp:7d} {cm.fn:7d}\n"
        f"actual Normal  {cm.fp:7d} {cm.tn:7d}\n"
        f"accuracy {cm.accuracy:.4f}  precision {cm.precision:.4f}  recall {cm.recall:.4f}"
    )
