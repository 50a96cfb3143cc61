"""Training: minimize binary cross-entropy over shuffled mini-batches with
Nadam, augmenting training samples only, and keep the checkpoint of the
epoch with the best validation accuracy (ties go to the earliest epoch).

All randomness derives from (cfg.seed, stream, epoch, index) paths, so a
rerun with the same config reproduces the checkpoint bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import rng as rngmod
from ..data.augment import AugmentConfig, augment
from ..data.boxes import BoundingBox
from ..data.store import Sample
from ..detect.geometry import crop
from ..imageproc.clahe import ClaheConfig
from ..imageproc.preprocess import PreprocessVariant, normalize, preprocess
from ..imageproc.resize import resize_bilinear
from ..nn import NadamConfig, bce_logit_grad, bce_loss, nadam_step, sigmoid
from .checkpoint import Checkpoint
from .model import OilNet40, OilNet40Spec, predict_batched


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 16
    optimizer: NadamConfig = field(default_factory=NadamConfig)
    augment: AugmentConfig | None = field(default_factory=AugmentConfig)
    variant: PreprocessVariant = PreprocessVariant.ORIGINAL
    clahe: ClaheConfig = field(default_factory=ClaheConfig)
    crop_margin: float = 0.1
    seed: int = 0
    # batches of unaugmented training data used to re-estimate batchnorm
    # running stats after each epoch (0 disables; EMA alone lags the weights)
    bn_recalibration_batches: int = 8

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        if self.bn_recalibration_batches < 0:
            raise ValueError("bn_recalibration_batches must be >= 0")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float
    val_precision: float
    val_recall: float


@dataclass
class TrainReport:
    first_step_loss: float = math.nan
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = 0.0

    def to_text(self) -> str:
        lines = ["report: train-report/v1",
                 f"first_step_loss {self.first_step_loss!r}",
                 f"best epoch {self.best_epoch} val_acc {self.best_val_accuracy!r}"]
        for r in self.epochs:
            lines.append(
                f"epoch {r.epoch} train_loss {r.train_loss!r} train_acc {r.train_acc!r} "
                f"val_loss {r.val_loss!r} val_acc {r.val_acc!r} "
                f"val_precision {r.val_precision!r} val_recall {r.val_recall!r}")
        return "\n".join(lines) + "\n"


class TrainingDiverged(RuntimeError):
    def __init__(self, msg: str, report: TrainReport):
        super().__init__(msg)
        self.report = report


def _full_frame_box() -> BoundingBox:
    return BoundingBox(0, 0.5, 0.5, 1.0, 1.0)


def make_example(sample: Sample, spec: OilNet40Spec, cfg: TrainConfig, aug_rng=None) -> np.ndarray:
    """Crop the labeled part, preprocess, resize to the network input, normalize.

    With aug_rng set, the sample is augmented first; if augmentation drops
    every box the unaugmented image and box are used instead.
    """
    img, boxes = sample.image, sample.boxes
    if aug_rng is not None and cfg.augment is not None:
        aug_img, aug_boxes = augment(img, boxes, cfg.augment, aug_rng)
        if aug_boxes or not boxes:
            img, boxes = aug_img, aug_boxes
    box = boxes[0] if boxes else _full_frame_box()
    patch = crop(img, box, cfg.crop_margin)
    patch = preprocess(patch, cfg.variant, cfg.clahe)
    patch = resize_bilinear(patch, spec.input_size, spec.input_size)
    return normalize(patch)


def materialize(samples: list[Sample], spec: OilNet40Spec, cfg: TrainConfig):
    """Inference-time tensors and labels for a sample list (no augmentation)."""
    xs = np.stack([make_example(s, spec, cfg) for s in samples])
    ys = np.asarray([s.label for s in samples], dtype=np.float32)
    return xs, ys


def _recalibrate_bn(model: OilNet40, samples: list[Sample], spec: OilNet40Spec,
                    cfg: TrainConfig) -> None:
    """Replace running stats with population moments over a fixed,
    evenly-spaced (class-covering), unaugmented subset of the training set."""
    m = min(len(samples), cfg.bn_recalibration_batches * cfg.batch_size)
    idx = np.unique(np.round(np.linspace(0, len(samples) - 1, m)).astype(int))
    subset = [samples[i] for i in idx]

    def batches():
        for start in range(0, len(subset), cfg.batch_size):
            chunk = subset[start:start + cfg.batch_size]
            yield np.stack([make_example(s, spec, cfg) for s in chunk])

    model.update_bn_stats(batches())


def _precision_recall(pred: np.ndarray, truth: np.ndarray) -> tuple[float, float]:
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall


def train(model: OilNet40, train_samples: list[Sample], val_samples: list[Sample],
          cfg: TrainConfig) -> tuple[Checkpoint, TrainReport]:
    if not train_samples or not val_samples:
        raise ValueError("training and validation sets must be non-empty")
    if any(s.label is None for s in train_samples + val_samples):
        raise ValueError("all training/validation samples need a class label")
    spec = model.spec
    if cfg.variant.output_channels != spec.input_channels:
        raise ValueError(
            f"variant {cfg.variant.value} produces {cfg.variant.output_channels} channels "
            f"but the model expects {spec.input_channels}")

    val_x, val_y = materialize(val_samples, spec, cfg)
    labels = np.asarray([s.label for s in train_samples], dtype=np.float32)
    n = len(train_samples)
    report = TrainReport()
    params = model.parameters()
    best_state: dict[str, np.ndarray] | None = None

    for epoch in range(1, cfg.epochs + 1):
        order = rngmod.stream(cfg.seed, rngmod.SHUFFLE, epoch).permutation(n)
        loss_sum = 0.0
        correct = 0
        for step, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            batch_x = np.stack([
                make_example(train_samples[i], spec, cfg,
                             aug_rng=rngmod.stream(cfg.seed, rngmod.AUGMENT, epoch, int(i)))
                for i in idx])
            batch_y = labels[idx]
            drop_rng = rngmod.stream(cfg.seed, rngmod.DROPOUT, epoch, step)
            logits, cache = model.forward(batch_x, train=True, rng=drop_rng)
            probs = sigmoid(logits)[:, 0]
            loss = bce_loss(probs, batch_y)
            if not math.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss {loss} at epoch {epoch} step {step}", report)
            if epoch == 1 and step == 0:
                report.first_step_loss = loss
            loss_sum += loss * len(idx)
            correct += int(np.sum((probs > np.float32(spec.threshold)).astype(np.int64)
                                  == batch_y.astype(np.int64)))
            model.backward(cache, bce_logit_grad(probs, batch_y)[:, None])
            nadam_step(params, cfg.optimizer)

        if cfg.bn_recalibration_batches > 0:
            _recalibrate_bn(model, train_samples, spec, cfg)
        val_probs = predict_batched(model, val_x)
        val_pred = (val_probs > np.float32(spec.threshold)).astype(np.int64)
        val_truth = val_y.astype(np.int64)
        val_loss = bce_loss(val_probs, val_y)
        val_acc = float(np.mean(val_pred == val_truth)) if len(val_truth) else 0.0
        precision, recall = _precision_recall(val_pred, val_truth)
        report.epochs.append(EpochRecord(
            epoch, loss_sum / n, correct / n, val_loss, val_acc, precision, recall))
        if best_state is None or val_acc > report.best_val_accuracy:
            report.best_val_accuracy = val_acc
            report.best_epoch = epoch
            best_state = {k: v.copy() for k, v in model.named_tensors().items()}

    model.load_tensors(best_state)
    ckpt = Checkpoint.from_model(model, meta={
        "seed": cfg.seed,
        "epochs_run": cfg.epochs,
        "best_epoch": report.best_epoch,
        "val_accuracy": repr(report.best_val_accuracy),
        "variant": cfg.variant.value,
    })
    return ckpt, report
