"""Annotation text format: one box per line, five whitespace-separated
numbers — integer class id, then center x/y and width/height normalized to
the image dimensions.  Writes use 6 decimal places, so a round trip holds
to 1e-6."""
from __future__ import annotations

from .boxes import BoundingBox


class LabelFormatError(ValueError):
    """Raised with a line number when a label line cannot be parsed."""


def parse_label_text(text: str) -> list[BoundingBox]:
    boxes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise LabelFormatError(f"line {lineno}: expected 5 fields, got {len(fields)}")
        try:
            class_id = int(fields[0])
            cx, cy, w, h = (float(v) for v in fields[1:])
        except ValueError:
            raise LabelFormatError(f"line {lineno}: non-numeric field in {line!r}") from None
        if class_id < 0:
            raise LabelFormatError(f"line {lineno}: class id must be non-negative, got {class_id}")
        for name, v in (("cx", cx), ("cy", cy), ("w", w), ("h", h)):
            if not 0.0 <= v <= 1.0:
                raise LabelFormatError(f"line {lineno}: {name}={v} out of range [0, 1]")
        if w <= 0 or h <= 0:
            raise LabelFormatError(f"line {lineno}: box size must be positive, got w={w} h={h}")
        boxes.append(BoundingBox(class_id, cx, cy, w, h))
    return boxes


def write_label_text(boxes: list[BoundingBox]) -> str:
    lines = [f"{b.class_id} {b.cx:.6f} {b.cy:.6f} {b.w:.6f} {b.h:.6f}" for b in boxes]
    return "".join(line + "\n" for line in lines)


def read_label_file(path) -> list[BoundingBox]:
    with open(path, "r", encoding="ascii") as f:
        return parse_label_text(f.read())


def write_label_file(path, boxes: list[BoundingBox]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(write_label_text(boxes))
