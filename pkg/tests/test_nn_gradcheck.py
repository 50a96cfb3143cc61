"""Every backward pass against central finite differences.

The scalar loss is a fixed random projection of the layer output, summed in
float64 so the only noise in the numeric gradient is the layer's own
float32 arithmetic.  Perturbation 1e-2, relative error at most 1e-3
(measured against max(|analytic|, |numeric|, 1)).
"""
import numpy as np
import pytest

from oilspot.nn import (
    conv2d_forward, conv2d_backward, relu, relu_backward,
    maxpool2d, maxpool2d_backward, dense_forward, dense_backward,
    dropout, dropout_backward, sigmoid, bce_loss, bce_logit_grad,
    batchnorm_forward, batchnorm_backward,
)
from oilspot import rng as rngmod

from oracles import numeric_grad, max_rel_err

H = 1e-2
RTOL = 1e-3


def projection(g, shape):
    return np.asarray(g.choice([-1.0, 1.0], size=shape), dtype=np.float32)


def spaced_values(g, shape, gap=0.08):
    """Random tensor whose 2x2 pool windows have pairwise gaps > gap.

    Keeps finite differences well away from max-switching points.
    """
    n, c, h, w = shape
    while True:
        x = np.asarray(g.uniform(0, 4, size=shape), dtype=np.float32)
        win = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(-1, 4)
        s = np.sort(win, axis=1)
        if np.min(np.diff(s, axis=1)) > gap:
            return x


class TestConvGrad:
    def test_spec_case_1x2x5x5(self):
        g = rngmod.stream(11, 98)
        x = np.asarray(g.normal(size=(1, 2, 5, 5)), dtype=np.float32)
        w = np.asarray(g.normal(size=(3, 2, 3, 3)), dtype=np.float32)
        b = np.asarray(g.normal(size=3), dtype=np.float32)
        y, ctx = conv2d_forward(x, w, b, padding="same")
        u = projection(g, y.shape)
        dx, dw, db = conv2d_backward(ctx, u)

        fx = lambda v: float(np.sum(conv2d_forward(v, w, b, "same")[0].astype(np.float64) * u))
        fw = lambda v: float(np.sum(conv2d_forward(x, v, b, "same")[0].astype(np.float64) * u))
        fb = lambda v: float(np.sum(conv2d_forward(x, w, v, "same")[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(fx, x, H)) <= RTOL
        assert max_rel_err(dw, numeric_grad(fw, w, H)) <= RTOL
        assert max_rel_err(db, numeric_grad(fb, b, H)) <= RTOL

    @pytest.mark.parametrize("trial", range(3))
    def test_random_shapes(self, trial):
        g = rngmod.stream(12, 98, trial)
        n, c, oc = [int(v) for v in g.integers(1, 3, size=3)]
        h = int(g.integers(3, 7))
        w = int(g.integers(3, 7))
        x = np.asarray(g.normal(size=(n, c, h, w)), dtype=np.float32)
        wt = np.asarray(g.normal(size=(oc, c, 3, 3)), dtype=np.float32)
        b = np.asarray(g.normal(size=oc), dtype=np.float32)
        y, ctx = conv2d_forward(x, wt, b, padding="same")
        u = projection(g, y.shape)
        dx, dw, db = conv2d_backward(ctx, u)
        fx = lambda v: float(np.sum(conv2d_forward(v, wt, b, "same")[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(fx, x, H)) <= RTOL


class TestReluGrad:
    def test_away_from_kink(self):
        g = rngmod.stream(13, 98)
        x = np.asarray(g.normal(size=(4, 7)), dtype=np.float32)
        x = np.where(np.abs(x) < 0.05, np.float32(0.05), x)  # FD step must not cross 0
        y, mask = relu(x)
        u = projection(g, y.shape)
        dx = relu_backward(mask, u)
        f = lambda v: float(np.sum(relu(v)[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(f, x, H)) <= RTOL


class TestMaxpoolGrad:
    def test_spaced_windows(self):
        g = rngmod.stream(14, 98)
        x = spaced_values(g, (1, 2, 6, 6))
        y, _, ctx = maxpool2d(x)
        u = projection(g, y.shape)
        dx = maxpool2d_backward(ctx, u)
        f = lambda v: float(np.sum(maxpool2d(v)[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(f, x, H)) <= RTOL


class TestDenseGrad:
    def test_all_inputs(self):
        g = rngmod.stream(15, 98)
        x = np.asarray(g.normal(size=(3, 5)), dtype=np.float32)
        w = np.asarray(g.normal(size=(5, 4)), dtype=np.float32)
        b = np.asarray(g.normal(size=4), dtype=np.float32)
        y, ctx = dense_forward(x, w, b)
        u = projection(g, y.shape)
        dx, dw, db = dense_backward(ctx, u)
        fx = lambda v: float(np.sum(dense_forward(v, w, b)[0].astype(np.float64) * u))
        fw = lambda v: float(np.sum(dense_forward(x, v, b)[0].astype(np.float64) * u))
        fb = lambda v: float(np.sum(dense_forward(x, w, v)[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(fx, x, H)) <= RTOL
        assert max_rel_err(dw, numeric_grad(fw, w, H)) <= RTOL
        assert max_rel_err(db, numeric_grad(fb, b, H)) <= RTOL


class TestBatchnormGrad:
    def test_train_mode_x_gamma_beta(self):
        g = rngmod.stream(16, 98)
        x = np.asarray(g.normal(size=(2, 3, 4, 4)), dtype=np.float32)
        gamma = np.asarray(g.uniform(0.5, 1.5, size=3), dtype=np.float32)
        beta = np.asarray(g.normal(size=3), dtype=np.float32)

        def fwd(xx, gg, bb):
            rm = np.zeros(3, dtype=np.float32)
            rv = np.ones(3, dtype=np.float32)
            return batchnorm_forward(xx, gg, bb, rm, rv, train=True)

        y, ctx = fwd(x, gamma, beta)
        u = projection(g, y.shape)
        dx, dgamma, dbeta = batchnorm_backward(ctx, u)
        fx = lambda v: float(np.sum(fwd(v, gamma, beta)[0].astype(np.float64) * u))
        fg = lambda v: float(np.sum(fwd(x, v, beta)[0].astype(np.float64) * u))
        fb = lambda v: float(np.sum(fwd(x, gamma, v)[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(fx, x, H)) <= RTOL
        assert max_rel_err(dgamma, numeric_grad(fg, gamma, H)) <= RTOL
        assert max_rel_err(dbeta, numeric_grad(fb, beta, H)) <= RTOL

    def test_infer_mode_x(self):
        g = rngmod.stream(17, 98)
        x = np.asarray(g.normal(size=(2, 3, 4, 4)), dtype=np.float32)
        gamma = np.asarray(g.uniform(0.5, 1.5, size=3), dtype=np.float32)
        beta = np.asarray(g.normal(size=3), dtype=np.float32)
        rm = np.asarray(g.normal(size=3), dtype=np.float32)
        rv = np.asarray(g.uniform(0.5, 2.0, size=3), dtype=np.float32)
        y, ctx = batchnorm_forward(x, gamma, beta, rm, rv, train=False)
        u = projection(g, y.shape)
        dx, _, _ = batchnorm_backward(ctx, u)
        f = lambda v: float(np.sum(
            batchnorm_forward(v, gamma, beta, rm.copy(), rv.copy(), train=False)[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(f, x, H)) <= RTOL


class TestDropoutGrad:
    def test_fixed_mask_linear_map(self):
        g = rngmod.stream(18, 98)
        x = np.asarray(g.normal(size=(5, 6)), dtype=np.float32)
        y, ctx = dropout(x, 0.25, train=True, rng=rngmod.stream(18, 97))
        u = projection(g, y.shape)
        dx = dropout_backward(ctx, u)
        # rebuilding the rng from the same path fixes the mask per evaluation
        f = lambda v: float(np.sum(
            dropout(v, 0.25, train=True, rng=rngmod.stream(18, 97))[0].astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(f, x, H)) <= RTOL


class TestSigmoidBceGrad:
    def test_sigmoid_derivative_at_zero(self):
        x = np.asarray([0.0], dtype=np.float32)
        f = lambda v: float(sigmoid(v).astype(np.float64).sum())
        num = numeric_grad(f, x, H)
        assert abs(num[0] - 0.25) < 1e-3

    def test_sigmoid_grad_random(self):
        g = rngmod.stream(19, 98)
        x = np.asarray(g.normal(size=12), dtype=np.float32)
        y = sigmoid(x)
        u = projection(g, y.shape)
        dx = u * y * (1 - y)
        f = lambda v: float(np.sum(sigmoid(v).astype(np.float64) * u))
        assert max_rel_err(dx, numeric_grad(f, x, H)) <= RTOL

    def test_fused_bce_logit_grad_vs_fd(self):
        g = rngmod.stream(20, 98)
        z = np.asarray(g.normal(size=6), dtype=np.float32)
        y = np.asarray(g.integers(0, 2, size=6), dtype=np.float32)
        dz = bce_logit_grad(sigmoid(z), y)
        f = lambda v: bce_loss(sigmoid(v), y)
        assert max_rel_err(dz, numeric_grad(f, z, H)) <= RTOL
