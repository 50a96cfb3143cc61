"""Forward and backward kernels for the layers the classifier needs.

Every op is a pure function of its explicit arguments.  Forward passes
return an output plus a context tuple; the matching backward consumes that
context and the upstream gradient and returns exact gradients of the
forward map.  All arithmetic is float32 with a fixed summation order, so
results are bit-reproducible on one platform.

Convolution is cross-correlation (no kernel flip), implemented as im2col
followed by one matrix multiply.  The input-gradient scatter runs as a
fixed-order loop over kernel offsets, never through atomic accumulation.
"""
from __future__ import annotations

import numpy as np

from .tensor import DTYPE


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


# ---------------------------------------------------------------------------
# conv2d
# ---------------------------------------------------------------------------

def _conv_padding(kh: int, kw: int, padding: str) -> tuple[int, int]:
    if padding == "valid":
        return 0, 0
    if padding == "same":
        _require(kh % 2 == 1 and kw % 2 == 1,
                 f"'same' padding needs odd kernel dims, got {kh}x{kw}")
        return (kh - 1) // 2, (kw - 1) // 2
    raise ValueError(f"unknown padding {padding!r} (expected 'same' or 'valid')")


def _im2col(x: np.ndarray, kh: int, kw: int, ph: int, pw: int):
    n, c, h, w = x.shape
    if ph or pw:
        x = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    oh = h + 2 * ph - kh + 1
    ow = w + 2 * pw - kw + 1
    _require(oh >= 1 and ow >= 1,
             f"kernel {kh}x{kw} does not fit padded input {h + 2 * ph}x{w + 2 * pw}")
    sn, sc, sh, sw = x.strides
    win = np.lib.stride_tricks.as_strided(
        x, (n, c, oh, ow, kh, kw), (sn, sc, sh, sw, sh, sw), writeable=False)
    cols = np.ascontiguousarray(win.transpose(0, 2, 3, 1, 4, 5)).reshape(n * oh * ow, c * kh * kw)
    return cols, oh, ow


def conv2d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, padding: str = "same"):
    """Cross-correlate NCHW input with (out_ch, in_ch, kh, kw) filters plus bias.

    Returns (output NCHW, ctx).
    """
    _require(x.ndim == 4, f"conv2d input must be 4-D NCHW, got shape {x.shape}")
    _require(w.ndim == 4, f"conv2d weights must be 4-D, got shape {w.shape}")
    n, c, h, wd = x.shape
    oc, ic, kh, kw = w.shape
    _require(c == ic, f"input has {c} channels but weights expect {ic}")
    _require(b.shape == (oc,), f"bias shape {b.shape} != ({oc},)")
    ph, pw = _conv_padding(kh, kw, padding)
    cols, oh, ow = _im2col(x, kh, kw, ph, pw)
    out = cols @ w.reshape(oc, ic * kh * kw).T
    out += b
    y = np.ascontiguousarray(out.reshape(n, oh, ow, oc).transpose(0, 3, 1, 2))
    ctx = (cols, x.shape, w, ph, pw, oh, ow)
    return y, ctx


def conv2d_backward(ctx, dy: np.ndarray):
    """Gradients of conv2d_forward: (dx, dw, db)."""
    cols, x_shape, w, ph, pw, oh, ow = ctx
    n, c, h, wd = x_shape
    oc, ic, kh, kw = w.shape
    _require(dy.shape == (n, oc, oh, ow),
             f"upstream shape {dy.shape} != forward output {(n, oc, oh, ow)}")
    dmat = np.ascontiguousarray(dy.transpose(0, 2, 3, 1)).reshape(n * oh * ow, oc)
    dw = (dmat.T @ cols).reshape(oc, ic, kh, kw)
    db = np.ascontiguousarray(dy.sum(axis=(0, 2, 3)))
    dcols = (dmat @ w.reshape(oc, ic * kh * kw)).reshape(n, oh, ow, c, kh, kw)
    dxp = np.zeros((n, c, h + 2 * ph, wd + 2 * pw), dtype=DTYPE)
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i:i + oh, j:j + ow] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    dx = np.ascontiguousarray(dxp[:, :, ph:ph + h, pw:pw + wd])
    return dx, dw, db


# ---------------------------------------------------------------------------
# relu
# ---------------------------------------------------------------------------

def relu(x: np.ndarray):
    """Elementwise max(0, x).  Returns (y, ctx)."""
    mask = x > 0
    return np.where(mask, x, DTYPE(0)), mask


def relu_backward(mask: np.ndarray, dy: np.ndarray) -> np.ndarray:
    # Subgradient at exactly 0 is 0.
    return np.where(mask, dy, DTYPE(0))


# ---------------------------------------------------------------------------
# 2x2 max pooling, stride 2
# ---------------------------------------------------------------------------

def maxpool2d(x: np.ndarray):
    """2x2/stride-2 max pool.  Returns (y, argmax, ctx).

    argmax holds, per output cell, the row-major window index (0..3) of the
    max; ties resolve to the first index, which makes the backward scatter
    deterministic.
    """
    _require(x.ndim == 4, f"maxpool input must be 4-D NCHW, got shape {x.shape}")
    n, c, h, w = x.shape
    _require(h % 2 == 0 and w % 2 == 0, f"maxpool needs even H and W, got {h}x{w}")
    win = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    flat = np.ascontiguousarray(win).reshape(n, c, h // 2, w // 2, 4)
    arg = flat.argmax(axis=-1)
    y = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]
    return np.ascontiguousarray(y), arg, (x.shape, arg)


def maxpool2d_backward(ctx, dy: np.ndarray) -> np.ndarray:
    x_shape, arg = ctx
    n, c, h, w = x_shape
    flat = np.zeros((n, c, h // 2, w // 2, 4), dtype=DTYPE)
    np.put_along_axis(flat, arg[..., None], dy[..., None].astype(DTYPE), axis=-1)
    win = flat.reshape(n, c, h // 2, w // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5)
    return np.ascontiguousarray(win).reshape(n, c, h, w)


# ---------------------------------------------------------------------------
# dense
# ---------------------------------------------------------------------------

def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Affine map x @ w + b for x of shape (N, F).  Returns (y, ctx)."""
    _require(x.ndim == 2, f"dense input must be 2-D, got shape {x.shape}")
    _require(x.shape[1] == w.shape[0],
             f"dense input width {x.shape[1]} != weight rows {w.shape[0]}")
    _require(b.shape == (w.shape[1],), f"bias shape {b.shape} != ({w.shape[1]},)")
    return x @ w + b, (x, w)


def dense_backward(ctx, dy: np.ndarray):
    x, w = ctx
    _require(dy.shape == (x.shape[0], w.shape[1]),
             f"upstream shape {dy.shape} != forward output {(x.shape[0], w.shape[1])}")
    dx = dy @ w.T
    dw = x.T @ dy
    db = np.ascontiguousarray(dy.sum(axis=0))
    return dx, dw, db


# ---------------------------------------------------------------------------
# dropout (inverted: inference is identity)
# ---------------------------------------------------------------------------

def dropout(x: np.ndarray, rate: float, train: bool, rng=None):
    """Zero each element with probability `rate`, scaling survivors by 1/(1-rate).

    Inference mode returns the input unchanged (bit-exact identity).
    Returns (y, ctx).
    """
    _require(0.0 <= rate < 1.0, f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        return x, None
    keep = rng.random(x.shape) >= rate
    scale = keep.astype(DTYPE) * DTYPE(1.0 / (1.0 - rate))
    return x * scale, scale


def dropout_backward(ctx, dy: np.ndarray) -> np.ndarray:
    if ctx is None:
        return dy
    return dy * ctx


# ---------------------------------------------------------------------------
# sigmoid
# ---------------------------------------------------------------------------

def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function; saturates without overflow."""
    out = np.empty_like(x, dtype=DTYPE)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Gradient through sigmoid given its output y."""
    return dy * y * (DTYPE(1) - y)
