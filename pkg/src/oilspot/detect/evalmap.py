"""Detection evaluation: mean average precision over IoU thresholds
0.50:0.05:0.95, all-point (precision envelope) interpolation.

Matching is greedy per threshold: detections in descending score order each
take the unmatched ground-truth box of highest IoU at or above the
threshold.  Tie-breaking is derived from content (score, image id, box), so
the result is invariant under permutations of the detection list.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..data.boxes import BoundingBox
from .geometry import iou
from .nms import Detection

DEFAULT_THRESHOLDS = tuple((50 + 5 * i) / 100 for i in range(10))


@dataclass(frozen=True)
class DetEvalResult:
    thresholds: tuple[float, ...]
    average_precisions: tuple[float, ...]
    mean_ap: float
    tp_at_50: int
    fp_at_50: int
    fn_at_50: int

    def to_text(self) -> str:
        lines = ["report: det-eval/v1"]
        for t, ap in zip(self.thresholds, self.average_precisions):
            lines.append(f"ap {t:.2f} {ap!r}")
        lines.append(f"mean_ap {self.mean_ap!r}")
        lines.append(f"counts_at_0.50 tp {self.tp_at_50} fp {self.fp_at_50} fn {self.fn_at_50}")
        return "\n".join(lines) + "\n"


def _det_sort_key(d: Detection):
    return (-d.score, d.image_id, d.box.cx, d.box.cy, d.box.w, d.box.h)


def _match_records(dets_by_img, gt_by_img, thr):
    """Pooled (score, is_tp) records plus the matched-GT count at thr."""
    records = []
    n_matched = 0
    for img in sorted(set(dets_by_img) | set(gt_by_img)):
        dets = sorted(dets_by_img.get(img, []), key=_det_sort_key)
        gts = gt_by_img.get(img, [])
        taken = [False] * len(gts)
        for d in dets:
            best = -1
            best_iou = 0.0
            for gi, g in enumerate(gts):
                if taken[gi]:
                    continue
                v = iou(d.box, g)
                if v >= thr and v > best_iou:
                    best, best_iou = gi, v
            if best >= 0:
                taken[best] = True
                n_matched += 1
                records.append((d, True))
            else:
                records.append((d, False))
    return records, n_matched


def _average_precision(records, n_gt: int) -> float:
    if n_gt == 0:
        return 0.0
    records = sorted(records, key=lambda r: _det_sort_key(r[0]))
    tp = fp = 0
    points = []
    for _, is_tp in records:
        if is_tp:
            tp += 1
        else:
            fp += 1
        points.append((tp / n_gt, tp / (tp + fp)))
    ap = 0.0
    prev_r = 0.0
    # precision envelope, walking right to left
    env = 0.0
    envelope = [0.0] * len(points)
    for i in range(len(points) - 1, -1, -1):
        env = max(env, points[i][1])
        envelope[i] = env
    for i, (r, _p) in enumerate(points):
        if r > prev_r:
            ap += (r - prev_r) * envelope[i]
            prev_r = r
    return ap


def map_eval(dets: list[Detection], ground_truth: dict[str, list[BoundingBox]],
             thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS) -> DetEvalResult:
    dets_by_img: dict[str, list[Detection]] = {}
    for d in dets:
        dets_by_img.setdefault(d.image_id, []).append(d)
    n_gt = sum(len(v) for v in ground_truth.values())
    aps = []
    tp50 = fp50 = fn50 = 0
    for thr in thresholds:
        records, n_matched = _match_records(dets_by_img, ground_truth, thr)
        aps.append(_average_precision(records, n_gt))
        if thr == thresholds[0]:
            tp50 = n_matched
            fp50 = len(records) - n_matched
            fn50 = n_gt - n_matched
    mean = sum(aps) / len(aps) if aps else 0.0
    return DetEvalResult(tuple(thresholds), tuple(aps), mean, tp50, fp50, fn50)
