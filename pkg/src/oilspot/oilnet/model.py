"""OilNet40: three conv/BN/ReLU/pool blocks (8, 16, 32 filters of 3x3, same
padding), then two dropout/dense/BN/ReLU stages (400 and 64 units) and a
single sigmoid output unit thresholded at 0.5.

Forward/backward run batched for training; `predict` processes samples one
at a time so inference is batch-size invariant bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import rng as rngmod
from ..nn import (
    DTYPE, Parameter,
    batchnorm_forward, batchnorm_backward,
    conv2d_forward, conv2d_backward,
    dense_forward, dense_backward,
    dropout, dropout_backward,
    maxpool2d, maxpool2d_backward,
    relu, relu_backward,
    sigmoid,
)

LABEL_NORMAL = 0
LABEL_ANOMALY = 1


@dataclass(frozen=True)
class OilNet40Spec:
    input_size: int = 240
    input_channels: int = 3
    conv_filters: tuple[int, int, int] = (8, 16, 32)
    dense_widths: tuple[int, int] = (400, 64)
    dropout_rate: float = 0.25
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.input_size % 8 != 0 or self.input_size <= 0:
            raise ValueError(
                f"input size must be a positive multiple of 8 (three 2x2 pools), got {self.input_size}")
        if self.input_channels not in (1, 3):
            raise ValueError(f"input channels must be 1 or 3, got {self.input_channels}")
        if len(self.conv_filters) != 3:
            raise ValueError(f"need 3 conv stages, got {self.conv_filters}")
        if any(f < 1 for f in self.conv_filters) or any(u < 1 for u in self.dense_widths):
            raise ValueError("layer widths must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {self.dropout_rate}")

    @property
    def flatten_width(self) -> int:
        side = self.input_size // 8
        return side * side * self.conv_filters[-1]

    def to_fields(self) -> dict:
        return {
            "input_size": self.input_size,
            "input_channels": self.input_channels,
            "conv_filters": ",".join(str(v) for v in self.conv_filters),
            "dense_widths": ",".join(str(v) for v in self.dense_widths),
            "dropout_rate": repr(self.dropout_rate),
            "threshold": repr(self.threshold),
        }

    @classmethod
    def from_fields(cls, d: dict) -> "OilNet40Spec":
        return cls(
            input_size=int(d["input_size"]),
            input_channels=int(d["input_channels"]),
            conv_filters=tuple(int(v) for v in d["conv_filters"].split(",")),
            dense_widths=tuple(int(v) for v in d["dense_widths"].split(",")),
            dropout_rate=float(d["dropout_rate"]),
            threshold=float(d["threshold"]),
        )


class _BatchNorm:
    def __init__(self, name: str, width: int):
        self.gamma = Parameter(f"{name}/gamma", np.ones(width, dtype=DTYPE))
        self.beta = Parameter(f"{name}/beta", np.zeros(width, dtype=DTYPE))
        self.running_mean = np.zeros(width, dtype=DTYPE)
        self.running_var = np.ones(width, dtype=DTYPE)
        self.name = name


def _he_uniform(g, fan_in: int, shape) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return np.asarray(g.uniform(-bound, bound, size=shape), dtype=DTYPE)


class OilNet40:
    """The classifier network; parameters registered in data-flow order."""

    def __init__(self, spec: OilNet40Spec, seed: int = 0):
        self.spec = spec
        self.seed = seed
        g = rngmod.stream(seed, rngmod.INIT)
        self.conv_w: list[Parameter] = []
        self.conv_b: list[Parameter] = []
        self.conv_bn: list[_BatchNorm] = []
        in_ch = spec.input_channels
        for i, out_ch in enumerate(spec.conv_filters, start=1):
            fan_in = in_ch * 9
            self.conv_w.append(Parameter(f"conv{i}/w", _he_uniform(g, fan_in, (out_ch, in_ch, 3, 3))))
            self.conv_b.append(Parameter(f"conv{i}/b", np.zeros(out_ch, dtype=DTYPE)))
            self.conv_bn.append(_BatchNorm(f"bn{i}", out_ch))
            in_ch = out_ch
        self.dense_w: list[Parameter] = []
        self.dense_b: list[Parameter] = []
        self.dense_bn: list[_BatchNorm] = []
        width = spec.flatten_width
        for i, units in enumerate(spec.dense_widths, start=1):
            self.dense_w.append(Parameter(f"dense{i}/w", _he_uniform(g, width, (width, units))))
            self.dense_b.append(Parameter(f"dense{i}/b", np.zeros(units, dtype=DTYPE)))
            self.dense_bn.append(_BatchNorm(f"bn{len(spec.conv_filters) + i}", units))
            width = units
        # zero output unit: the untrained net scores exactly 0.5 (chance) and
        # still learns, since its input activations are nonzero
        self.out_w = Parameter("out/w", np.zeros((width, 1), dtype=DTYPE))
        self.out_b = Parameter("out/b", np.zeros(1, dtype=DTYPE))

    # -- registries ---------------------------------------------------------

    def parameters(self) -> list[Parameter]:
        params: list[Parameter] = []
        for w, b, bn in zip(self.conv_w, self.conv_b, self.conv_bn):
            params += [w, b, bn.gamma, bn.beta]
        for w, b, bn in zip(self.dense_w, self.dense_b, self.dense_bn):
            params += [w, b, bn.gamma, bn.beta]
        params += [self.out_w, self.out_b]
        return params

    def buffers(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for bn in list(self.conv_bn) + list(self.dense_bn):
            out[f"{bn.name}/running_mean"] = bn.running_mean
            out[f"{bn.name}/running_var"] = bn.running_var
        return out

    def named_tensors(self) -> dict[str, np.ndarray]:
        out = {p.name: p.value for p in self.parameters()}
        out.update(self.buffers())
        return out

    def load_tensors(self, tensors: dict[str, np.ndarray]) -> None:
        own = self.named_tensors()
        missing = set(own) - set(tensors)
        if missing:
            raise ValueError(f"missing tensors: {sorted(missing)}")
        for name, arr in own.items():
            src = np.asarray(tensors[name], dtype=DTYPE)
            if src.shape != arr.shape:
                raise ValueError(f"tensor {name}: shape {src.shape} != expected {arr.shape}")
            arr[...] = src

    def n_trainable(self) -> int:
        return sum(p.value.size for p in self.parameters())

    def n_non_trainable(self) -> int:
        return sum(v.size for v in self.buffers().values())

    # -- forward / backward -------------------------------------------------

    def forward(self, x: np.ndarray, train: bool = False, rng=None):
        """x: (N, C, H, W) float32 in [0, 1].  Returns (logits (N, 1), cache).

        Train mode uses batch statistics (updating running stats) and applies
        dropout when an rng is given; without one, dropout stays off.
        """
        if x.ndim != 4 or x.shape[1:] != (self.spec.input_channels,
                                          self.spec.input_size, self.spec.input_size):
            raise ValueError(
                f"input shape {x.shape} does not match spec "
                f"(N, {self.spec.input_channels}, {self.spec.input_size}, {self.spec.input_size})")
        use_dropout = train and rng is not None
        cache = {"train": train, "blocks": [], "dense": []}
        h = np.ascontiguousarray(x, dtype=DTYPE)
        for w, b, bn in zip(self.conv_w, self.conv_b, self.conv_bn):
            h, conv_ctx = conv2d_forward(h, w.value, b.value, padding="same")
            h, bn_ctx = batchnorm_forward(h, bn.gamma.value, bn.beta.value,
                                          bn.running_mean, bn.running_var, train)
            h, relu_ctx = relu(h)
            h, _, pool_ctx = maxpool2d(h)
            cache["blocks"].append((conv_ctx, bn_ctx, relu_ctx, pool_ctx))
        n = h.shape[0]
        cache["pre_flatten_shape"] = h.shape
        h = h.reshape(n, -1)
        for w, b, bn in zip(self.dense_w, self.dense_b, self.dense_bn):
            h, drop_ctx = dropout(h, self.spec.dropout_rate, use_dropout, rng)
            h, dense_ctx = dense_forward(h, w.value, b.value)
            h, bn_ctx = batchnorm_forward(h, bn.gamma.value, bn.beta.value,
                                          bn.running_mean, bn.running_var, train)
            h, relu_ctx = relu(h)
            cache["dense"].append((drop_ctx, dense_ctx, bn_ctx, relu_ctx))
        logits, out_ctx = dense_forward(h, self.out_w.value, self.out_b.value)
        cache["out"] = out_ctx
        return logits, cache

    def update_bn_stats(self, batches) -> None:
        """Re-estimate every normalization layer's running stats as exact
        population moments over the given batches.

        Batches flow through the train-mode computation (per-batch
        normalization downstream, dropout off); each layer accumulates the
        sum and sum of squares of its pre-normalization input in float64,
        and the running mean/var are replaced at the end.  Batch composition
        therefore cannot bias the variance.
        """
        stats: dict[str, list] = {}

        def accumulate(bn, h, axes):
            cnt = h.size // h.shape[1]
            s = h.sum(axis=axes, dtype=np.float64)
            q = (h.astype(np.float64) ** 2).sum(axis=axes)
            if bn.name not in stats:
                stats[bn.name] = [bn, 0, np.zeros_like(s), np.zeros_like(q)]
            rec = stats[bn.name]
            rec[1] += cnt
            rec[2] += s
            rec[3] += q

        for x in batches:
            h = np.ascontiguousarray(x, dtype=DTYPE)
            for w, b, bn in zip(self.conv_w, self.conv_b, self.conv_bn):
                h, _ = conv2d_forward(h, w.value, b.value, padding="same")
                accumulate(bn, h, (0, 2, 3))
                # momentum 1: normalize by this batch's stats, running untouched
                h, _ = batchnorm_forward(h, bn.gamma.value, bn.beta.value,
                                         bn.running_mean, bn.running_var,
                                         train=True, momentum=1.0)
                h, _ = relu(h)
                h, _, _ = maxpool2d(h)
            h = h.reshape(h.shape[0], -1)
            for w, b, bn in zip(self.dense_w, self.dense_b, self.dense_bn):
                h, _ = dense_forward(h, w.value, b.value)
                accumulate(bn, h, (0,))
                h, _ = batchnorm_forward(h, bn.gamma.value, bn.beta.value,
                                         bn.running_mean, bn.running_var,
                                         train=True, momentum=1.0)
                h, _ = relu(h)
        for bn, count, s, q in stats.values():
            mean = s / count
            var = np.maximum(q / count - mean * mean, 0.0)
            bn.running_mean[...] = mean.astype(DTYPE)
            bn.running_var[...] = var.astype(DTYPE)

    def backward(self, cache, dlogits: np.ndarray) -> np.ndarray:
        """Accumulate parameter gradients; returns the input gradient."""
        dh, dw, db = dense_backward(cache["out"], np.ascontiguousarray(dlogits, dtype=DTYPE))
        self.out_w.grad += dw
        self.out_b.grad += db
        for (drop_ctx, dense_ctx, bn_ctx, relu_ctx), w, b, bn in zip(
                reversed(cache["dense"]), reversed(self.dense_w),
                reversed(self.dense_b), reversed(self.dense_bn)):
            dh = relu_backward(relu_ctx, dh)
            dh, dgamma, dbeta = batchnorm_backward(bn_ctx, dh)
            bn.gamma.grad += dgamma
            bn.beta.grad += dbeta
            dh, dw, db = dense_backward(dense_ctx, dh)
            w.grad += dw
            b.grad += db
            dh = dropout_backward(drop_ctx, dh)
        dh = dh.reshape(cache["pre_flatten_shape"])
        for (conv_ctx, bn_ctx, relu_ctx, pool_ctx), w, b, bn in zip(
                reversed(cache["blocks"]), reversed(self.conv_w),
                reversed(self.conv_b), reversed(self.conv_bn)):
            dh = maxpool2d_backward(pool_ctx, dh)
            dh = relu_backward(relu_ctx, dh)
            dh, dgamma, dbeta = batchnorm_backward(bn_ctx, dh)
            bn.gamma.grad += dgamma
            bn.beta.grad += dbeta
            dh, dw, db = conv2d_backward(conv_ctx, dh)
            w.grad += dw
            b.grad += db
        return dh

    # -- inference ----------------------------------------------------------

    def feature_maps(self, x: np.ndarray, conv_index: int) -> np.ndarray:
        """Block output (post-ReLU, pooled) of the selected conv stage, (F, h, w)."""
        if conv_index not in (1, 2, 3):
            raise ValueError(f"conv_index must be 1, 2 or 3, got {conv_index}")
        h = np.ascontiguousarray(x[None] if x.ndim == 3 else x, dtype=DTYPE)
        for i, (w, b, bn) in enumerate(zip(self.conv_w, self.conv_b, self.conv_bn), start=1):
            h, _ = conv2d_forward(h, w.value, b.value, padding="same")
            h, _ = batchnorm_forward(h, bn.gamma.value, bn.beta.value,
                                     bn.running_mean, bn.running_var, train=False)
            h, _ = relu(h)
            h, _, _ = maxpool2d(h)
            if i == conv_index:
                return h[0]
        raise AssertionError("unreachable")


def predict(model: OilNet40, x: np.ndarray):
    """Inference on one (C, H, W) tensor or a batch (N, C, H, W).

    Runs sample by sample so results never depend on batch size.  Returns
    (probability, label) for a single tensor, (probabilities, labels) arrays
    for a batch; label is 1 (anomaly) iff probability > threshold, ties to 0.
    """
    single = x.ndim == 3
    batch = x[None] if single else x
    probs = np.empty(batch.shape[0], dtype=DTYPE)
    for i in range(batch.shape[0]):
        logits, _ = model.forward(batch[i:i + 1], train=False)
        probs[i] = sigmoid(logits)[0, 0]
    labels = (probs > DTYPE(model.spec.threshold)).astype(np.int64)
    if single:
        return float(probs[0]), int(labels[0])
    return probs, labels


def predict_batched(model: OilNet40, x: np.ndarray, batch_size: int = 32) -> np.ndarray:
    """Fast batched inference used inside training loops; returns probabilities.

    Results are deterministic for a fixed batch size but may differ from
    `predict` in the last float32 bit; use `predict` wherever bit-stability
    across batch sizes matters.
    """
    probs = np.empty(x.shape[0], dtype=DTYPE)
    for start in range(0, x.shape[0], batch_size):
        chunk = x[start:start + batch_size]
        logits, _ = model.forward(chunk, train=False)
        probs[start:start + chunk.shape[0]] = sigmoid(logits)[:, 0]
    return probs


def dump_activations(model: OilNet40, x: np.ndarray, conv_index: int) -> list[np.ndarray]:
    """Per-filter feature maps as single-channel images, min-max scaled to
    [0, 255]; constant channels map to 0."""
    maps = model.feature_maps(x, conv_index)
    out = []
    for ch in maps:
        lo = float(ch.min())
        hi = float(ch.max())
        if hi > lo:
            scaled = (ch.astype(np.float64) - lo) * (255.0 / (hi - lo))
        else:
            scaled = np.zeros(ch.shape, dtype=np.float64)
        out.append(np.floor(scaled + 0.5).astype(np.uint8)[:, :, None])
    return out
