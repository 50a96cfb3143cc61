"""Dense float32 tensors and trainable parameters.

A tensor is a contiguous numpy float32 array in channel-major layout
(batch, channels, height, width for 4-D; row-major within).  NaN or Inf in
an op result is an error state; `assert_finite` is the check used at the
points where it matters (loss values, training steps).
"""
from __future__ import annotations

import numpy as np

DTYPE = np.float32


def as_tensor(values, shape=None) -> np.ndarray:
    """Coerce to a contiguous float32 array, optionally reshaped."""
    arr = np.ascontiguousarray(values, dtype=DTYPE)
    if shape is not None:
        arr = arr.reshape(shape)
    return arr


def assert_finite(x, what: str = "tensor") -> None:
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"{what} contains NaN or Inf")


class Parameter:
    """Trainable tensor plus gradient and optimizer moment slots.

    All four arrays share one shape; `step` counts optimizer updates applied
    to this parameter.
    """

    __slots__ = ("name", "value", "grad", "m", "v", "step")

    def __init__(self, name: str, value) -> None:
        self.name = name
        self.value = as_tensor(value)
        self.grad = np.zeros_like(self.value)
        self.m = np.zeros_like(self.value)
        self.v = np.zeros_like(self.value)
        self.step = 0

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={tuple(self.value.shape)}, step={self.step})"
