"""
Network building blocks composed from the differentiable primitives.
"""
import math
from typing import Mapping, Optional, Tuple

import numpy as np

from src.diffcore import ops
from src.diffcore.tensor import ArrayLike, Tensor, as_tensor
from src.utils.errors import DimensionError

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def linear(x: ArrayLike, W: Tensor, bias: Tensor) -> Tensor:
    """
    Affine map y = xW + bias.

    @param x - Input of shape (b, d_in)
    @param W - Weights of shape (d_in, d_out)
    @param bias - Bias of shape (d_out,)
    @return Output of shape (b, d_out)
    """
    x = as_tensor(x)
    if x.ndim != 2 or W.ndim != 2 or x.shape[1] != W.shape[0]:
        raise DimensionError("linear", f"(b, {W.shape[0] if W.ndim == 2 else '?'})", x.shape)
    if bias.shape != (W.shape[1],):
        raise DimensionError("linear.bias", (W.shape[1],), bias.shape)
    return ops.matmul(x, W) + bias


def gru_cell(x: ArrayLike, h: ArrayLike, params: Mapping[str, Tensor]) -> Tensor:
    """
    One GRU step with reset, update and candidate blocks laid out as [r | z | n].

    h' = (1 - z) * n + z * h

    @param x - Input (b, d)
    @param h - Hidden state (b, H)
    @param params - w_x (d, 3H), w_h (H, 3H), b_x (3H,), b_h (3H,)
    @return New hidden state (b, H)
    """
    x, h = as_tensor(x), as_tensor(h)
    H = params["w_h"].shape[0]
    if h.ndim != 2 or h.shape[1] != H:
        raise DimensionError("gru_cell.h", f"(b, {H})", h.shape)
    if x.shape[0] != h.shape[0]:
        raise DimensionError("gru_cell.batch", h.shape[0], x.shape[0])
    gx = linear(x, params["w_x"], params["b_x"])
    gh = linear(h, params["w_h"], params["b_h"])
    r = ops.sigmoid(gx[:, :H] + gh[:, :H])
    z = ops.sigmoid(gx[:, H:2 * H] + gh[:, H:2 * H])
    n = ops.tanh(gx[:, 2 * H:] + r * gh[:, 2 * H:])
    return n + z * (h - n)


def lstm_cell(
    x: ArrayLike, h: ArrayLike, c: ArrayLike, params: Mapping[str, Tensor]
) -> Tuple[Tensor, Tensor]:
    """
    One LSTM step with gate blocks laid out as [i | f | g | o].

    @param x - Input (b, d)
    @param h - Hidden state (b, H)
    @param c - Cell state (b, H)
    @param params - w_x (d, 4H), w_h (H, 4H), b (4H,)
    @return (h', c')
    """
    x, h, c = as_tensor(x), as_tensor(h), as_tensor(c)
    H = params["w_h"].shape[0]
    if h.ndim != 2 or h.shape[1] != H:
        raise DimensionError("lstm_cell.h", f"(b, {H})", h.shape)
    if c.shape != h.shape:
        raise DimensionError("lstm_cell.c", h.shape, c.shape)
    if x.shape[0] != h.shape[0]:
        raise DimensionError("lstm_cell.batch", h.shape[0], x.shape[0])
    gates = linear(x, params["w_x"], params["b"]) + ops.matmul(h, params["w_h"])
    i = ops.sigmoid(gates[:, :H])
    f = ops.sigmoid(gates[:, H:2 * H])
    g = ops.tanh(gates[:, 2 * H:3 * H])
    o = ops.sigmoid(gates[:, 3 * H:])
    c_next = f * c + i * g
    h_next = o * ops.tanh(c_next)
    return h_next, c_next


def gaussian_nll(
    mean: ArrayLike, logvar: ArrayLike, target: ArrayLike, weights: Optional[np.ndarray] = None
) -> Tensor:
    """
    Summed negative log-likelihood of a diagonal Gaussian.

    Σ ½ (logvar + (target - mean)² · exp(-logvar) + ln 2π)

    @param weights - Optional 0/1 array broadcastable to the element shape; masked elements add nothing
    @return Scalar tensor
    """
    mean, logvar, target = as_tensor(mean), as_tensor(logvar), as_tensor(target)
    if not (mean.shape == logvar.shape == target.shape):
        raise DimensionError("gaussian_nll", mean.shape, (logvar.shape, target.shape))
    residual = ops.square(target - mean) * ops.exp(-logvar)
    per_element = 0.5 * (logvar + residual)
    if weights is None:
        return ops.sum(per_element) + HALF_LOG_2PI * mean.size
    w = np.broadcast_to(np.asarray(weights, dtype=float), mean.shape)
    return ops.sum(per_element * w) + HALF_LOG_2PI * float(w.sum())
