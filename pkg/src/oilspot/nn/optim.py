"""Nadam: Adam with a Nesterov look-ahead in the first-moment term.

Per element, with bias-corrected moments m_hat and v_hat:

    m <- b1*m + (1-b1)*g          v <- b2*v + (1-b2)*g^2
    m_hat = m / (1 - b1^t)        v_hat = v / (1 - b2^t)
    theta <- theta - lr * (b1*m_hat + (1-b1)*g) / (sqrt(v_hat) + eps)

The look-ahead applies the momentum blend once more with the current
gradient, so the very first step equals a plain Adam step of size lr.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import DTYPE, Parameter


@dataclass(frozen=True)
class NadamConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError(f"betas must lie in (0,1), got {self.beta1}, {self.beta2}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def nadam_step(params: list[Parameter], cfg: NadamConfig) -> None:
    """Apply one Nadam update to every parameter, then zero the gradients."""
    lr = DTYPE(cfg.learning_rate)
    b1 = DTYPE(cfg.beta1)
    b2 = DTYPE(cfg.beta2)
    eps = DTYPE(cfg.epsilon)
    one = DTYPE(1)
    for p in params:
        t = p.step + 1
        g = p.grad
        p.m *= b1
        p.m += (one - b1) * g
        p.v *= b2
        p.v += (one - b2) * g * g
        m_hat = p.m / DTYPE(1.0 - cfg.beta1 ** t)
        v_hat = p.v / DTYPE(1.0 - cfg.beta2 ** t)
        m_bar = b1 * m_hat + (one - b1) * g
        p.value -= lr * m_bar / (np.sqrt(v_hat) + eps)
        p.step = t
        p.zero_grad()
