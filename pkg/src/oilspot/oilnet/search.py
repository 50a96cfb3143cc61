"""Hyperparameter search over dense-layer widths and learning rates.

Samples distinct grid combinations without replacement (budget equal to the
grid size degenerates to exhaustive grid search), trains each with the base
config's epoch budget, and ranks by best validation accuracy.  Every trial
derives its own seed, so trials are independent and the whole search is
deterministic for a given space seed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product

from .. import rng as rngmod
from .model import OilNet40, OilNet40Spec
from .train import TrainConfig, TrainingDiverged, train


@dataclass(frozen=True)
class SearchSpace:
    dense1: tuple[int, ...]
    dense2: tuple[int, ...]
    learning_rates: tuple[float, ...]
    budget: int
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.dense1 and self.dense2 and self.learning_rates):
            raise ValueError("candidate lists must be non-empty")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.budget > self.grid_size:
            raise ValueError(
                f"budget {self.budget} exceeds grid size {self.grid_size} "
                "(sampling is without replacement)")

    @property
    def grid_size(self) -> int:
        return len(self.dense1) * len(self.dense2) * len(self.learning_rates)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    dense1: int
    dense2: int
    learning_rate: float
    val_accuracy: float
    diverged: bool

    def spec_for(self, base: OilNet40Spec) -> OilNet40Spec:
        return replace(base, dense_widths=(self.dense1, self.dense2))


def random_search(space: SearchSpace, train_samples, val_samples,
                  base_spec: OilNet40Spec, base_cfg: TrainConfig):
    """Returns (trials ranked best-first, best trial)."""
    grid = list(product(space.dense1, space.dense2, space.learning_rates))
    order = rngmod.stream(space.seed, rngmod.SEARCH).permutation(len(grid))[:space.budget]
    trials: list[TrialResult] = []
    for trial_index, gi in enumerate(order):
        d1, d2, lr = grid[int(gi)]
        trial_seed = int(rngmod.stream(space.seed, rngmod.SEARCH, trial_index + 1)
                         .integers(0, 2**31 - 1))
        cfg = replace(base_cfg, optimizer=replace(base_cfg.optimizer, learning_rate=lr),
                      seed=trial_seed)
        spec = replace(base_spec, dense_widths=(d1, d2))
        model = OilNet40(spec, seed=trial_seed)
        diverged = False
        try:
            _, report = train(model, train_samples, val_samples, cfg)
            acc = report.best_val_accuracy
        except TrainingDiverged as e:
            acc = e.report.best_val_accuracy
            diverged = True
        trials.append(TrialResult(trial_index, d1, d2, lr, acc, diverged))
    ranked = sorted(trials, key=lambda t: (-t.val_accuracy, t.trial))
    return ranked, ranked[0]


def trials_to_text(trials: list[TrialResult]) -> str:
    lines = ["report: tune/v1"]
    for rank, t in enumerate(trials, start=1):
        lines.append(f"rank {rank} trial {t.trial} dense1 {t.dense1} dense2 {t.dense2} "
                     f"lr {t.learning_rate!r} val_acc {t.val_accuracy!r} diverged {int(t.diverged)}")
    return "\n".join(lines) + "\n"
