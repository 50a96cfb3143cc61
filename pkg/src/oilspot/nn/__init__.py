from .tensor import DTYPE, Parameter, as_tensor, assert_finite
from .kernels import (
    conv2d_forward, conv2d_backward,
    relu, relu_backward,
    maxpool2d, maxpool2d_backward,
    dense_forward, dense_backward,
    dropout, dropout_backward,
    sigmoid, sigmoid_backward,
)
from .batchnorm import batchnorm_forward, batchnorm_backward
from .loss import bce_loss, bce_logit_grad
from .optim import NadamConfig, nadam_step

__all__ = [
    "DTYPE", "Parameter", "as_tensor", "assert_finite",
    "conv2d_forward", "conv2d_backward", "relu", "relu_backward",
    "maxpool2d", "maxpool2d_backward", "dense_forward", "dense_backward",
    "dropout", "dropout_backward", "sigmoid", "sigmoid_backward",
    "batchnorm_forward", "batchnorm_backward",
    "bce_loss", "bce_logit_grad",
    "NadamConfig", "nadam_step",
]
