"""Binary cross-entropy on sigmoid outputs.

The loss value clamps probabilities away from 0 and 1; the gradient with
respect to the pre-sigmoid logit uses the fused, numerically stable form
(p - y), which never divides by a clamped probability.
"""
from __future__ import annotations

import numpy as np

from .tensor import DTYPE

P_CLAMP = 1e-7


def bce_loss(p: np.ndarray, y: np.ndarray) -> float:
    """Mean of -[y ln p + (1-y) ln(1-p)] with p clamped to [1e-7, 1-1e-7]."""
    p = np.clip(np.asarray(p, dtype=DTYPE), DTYPE(P_CLAMP), DTYPE(1.0 - P_CLAMP))
    y = np.asarray(y, dtype=DTYPE)
    terms = -(y * np.log(p) + (DTYPE(1) - y) * np.log(DTYPE(1) - p))
    return float(terms.mean())


def bce_logit_grad(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of the mean BCE with respect to the pre-sigmoid logits."""
    p = np.asarray(p, dtype=DTYPE)
    y = np.asarray(y, dtype=DTYPE)
    return (p - y) * DTYPE(1.0 / p.size)
