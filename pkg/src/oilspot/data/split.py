"""Deterministic train/val/test splitting."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .. import rng as rngmod


@dataclass(frozen=True)
class SplitManifest:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    seed: int

    def all_ids(self) -> tuple[str, ...]:
        return self.train + self.val + self.test

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "train": list(self.train),
             "val": list(self.val), "test": list(self.test)},
            indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplitManifest":
        d = json.loads(text)
        return cls(tuple(d["train"]), tuple(d["val"]), tuple(d["test"]), int(d["seed"]))


def split_dataset(ids, ratios: tuple[float, float, float], seed: int) -> SplitManifest:
    """Shuffle by seed, then allocate floor(N * ratio) to val and test with the
    remainder going to train."""
    ids = list(ids)
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios}")
    n = len(ids)
    g = rngmod.stream(seed, rngmod.SPLIT)
    order = [ids[i] for i in g.permutation(n)]
    # floor allocation; the epsilon absorbs float error when n*ratio is integral
    n_val = int(n * ratios[1] + 1e-9)
    n_test = int(n * ratios[2] + 1e-9)
    n_train = n - n_val - n_test
    return SplitManifest(
        train=tuple(order[:n_train]),
        val=tuple(order[n_train:n_train + n_val]),
        test=tuple(order[n_train + n_val:]),
        seed=seed,
    )
