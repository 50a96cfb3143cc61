"""Batch normalization over the channel axis.

Works on 2-D (N, F) dense activations and 4-D (N, C, H, W) feature maps.
Train mode normalizes with batch statistics and updates the running stats
in place via an exponential moving average; inference mode uses the running
stats only, which makes it deterministic and batch-size independent.
"""
from __future__ import annotations

import numpy as np

from .tensor import DTYPE


def _axes(x: np.ndarray) -> tuple:
    if x.ndim == 2:
        return (0,)
    if x.ndim == 4:
        return (0, 2, 3)
    raise ValueError(f"batchnorm expects 2-D or 4-D input, got shape {x.shape}")


def _per_channel(v: np.ndarray, ndim: int) -> np.ndarray:
    return v if ndim == 2 else v.reshape(1, -1, 1, 1)


def batchnorm_forward(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray,
                      running_mean: np.ndarray, running_var: np.ndarray,
                      train: bool, momentum: float = 0.99, eps: float = 1e-5):
    """Normalize per channel; returns (y, ctx).

    Train mode uses biased batch statistics over all non-channel axes and
    updates running_mean/running_var in place:
    running = momentum * running + (1 - momentum) * batch.
    """
    axes = _axes(x)
    ch = x.shape[1]
    if gamma.shape != (ch,) or beta.shape != (ch,):
        raise ValueError(f"gamma/beta must have shape ({ch},), got {gamma.shape}/{beta.shape}")
    eps = DTYPE(eps)
    if train:
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        running_mean *= DTYPE(momentum)
        running_mean += DTYPE(1.0 - momentum) * mean
        running_var *= DTYPE(momentum)
        running_var += DTYPE(1.0 - momentum) * var
    else:
        mean = running_mean
        var = running_var
    inv_std = DTYPE(1.0) / np.sqrt(var + eps)
    xhat = (x - _per_channel(mean, x.ndim)) * _per_channel(inv_std, x.ndim)
    y = xhat * _per_channel(gamma, x.ndim) + _per_channel(beta, x.ndim)
    ctx = (xhat, gamma, inv_std, train, axes)
    return y, ctx


def batchnorm_backward(ctx, dy: np.ndarray):
    """Gradients of batchnorm_forward: (dx, dgamma, dbeta)."""
    xhat, gamma, inv_std, train, axes = ctx
    dgamma = np.ascontiguousarray((dy * xhat).sum(axis=axes))
    dbeta = np.ascontiguousarray(dy.sum(axis=axes))
    g = _per_channel(gamma, dy.ndim)
    istd = _per_channel(inv_std, dy.ndim)
    if not train:
        return dy * g * istd, dgamma, dbeta
    m = DTYPE(dy.size // dy.shape[1])
    dxhat = dy * g
    dx = istd * (dxhat
                 - _per_channel(dxhat.sum(axis=axes), dy.ndim) / m
                 - xhat * _per_channel((dxhat * xhat).sum(axis=axes), dy.ndim) / m)
    return dx, dgamma, dbeta
