"""
Differentiable primitives.

Each primitive computes its forward value with numpy and hands make_node a
closure for the reverse pass. Binary elementwise primitives broadcast like
numpy and reduce gradients back to the operand shapes.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.diffcore.tensor import DTYPE, ArrayLike, Tensor, as_tensor, make_node
from src.utils.errors import DimensionError

Axis = Optional[Union[int, Tuple[int, ...]]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_broadcast(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("add", a, b)
    return make_node(
        "add", a.data + b.data, (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("sub", a, b)
    return make_node(
        "sub", a.data - b.data, (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("mul", a, b)
    return make_node(
        "mul", a.data * b.data, (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def neg(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return make_node("neg", -a.data, (a,), lambda g: (-g,))


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """Matrix product of two 2-D tensors."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError("matmul", f"(m, k) @ (k, n)", f"{a.shape} @ {b.shape}")
    return make_node(
        "matmul", a.data @ b.data, (a, b),
        lambda g: (g @ b.data.T, a.data.T @ g),
    )


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return make_node("exp", out, (a,), lambda g: (g * out,))


def square(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return make_node("square", a.data * a.data, (a,), lambda g: (2.0 * g * a.data,))


def sigmoid(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return make_node("sigmoid", out, (a,), lambda g: (g * out * (1.0 - out),))


def tanh(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.data)
    return make_node("tanh", out, (a,), lambda g: (g * (1.0 - out * out),))


def relu(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0
    return make_node("relu", np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def elu(a: ArrayLike, alpha: float = 1.0) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0
    neg_part = alpha * np.expm1(np.minimum(a.data, 0.0))
    out = np.where(mask, a.data, neg_part)
    return make_node("elu", out, (a,), lambda g: (g * np.where(mask, 1.0, neg_part + alpha),))


def absolute(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    return make_node("abs", np.abs(a.data), (a,), lambda g: (g * np.sign(a.data),))


def clamp(a: ArrayLike, lo: float, hi: float) -> Tensor:
    """Clip values to [lo, hi]; the gradient is zero where clipping is active."""
    a = as_tensor(a)
    inside = (a.data >= lo) & (a.data <= hi)
    return make_node("clamp", np.clip(a.data, lo, hi), (a,), lambda g: (g * inside,))


def sum(a: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = np.asarray(a.data.sum(axis=axis, keepdims=keepdims), dtype=DTYPE)

    def grad_fn(g: np.ndarray):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return make_node("sum", out, (a,), grad_fn)


def mean(a: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        count = a.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        count = int(np.prod([a.shape[ax] for ax in axes]))
    return mul(sum(a, axis=axis, keepdims=keepdims), 1.0 / max(count, 1))


def reshape(a: ArrayLike, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise DimensionError("reshape", tuple(shape), a.shape) from None
    return make_node("reshape", out, (a,), lambda g: (g.reshape(a.shape),))


def index(a: ArrayLike, key) -> Tensor:
    """Numpy-style indexing; gradients scatter-add back into the source shape."""
    a = as_tensor(a)
    out = np.array(a.data[key], dtype=DTYPE)

    def grad_fn(g: np.ndarray):
        full = np.zeros_like(a.data)
        np.add.at(full, key, g)
        return (full,)

    return make_node("index", out, (a,), grad_fn)


def gather(a: ArrayLike, indices: np.ndarray) -> Tensor:
    """
    Pick one entry per row along the last axis.

    @param a - Tensor of shape (..., k)
    @param indices - Integer array of shape (...)
    @return Tensor of shape (...)
    """
    a = as_tensor(a)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.shape != a.shape[:-1]:
        raise DimensionError("gather", a.shape[:-1], indices.shape)
    if indices.size and (indices.min() < 0 or indices.max() >= a.shape[-1]):
        raise DimensionError("gather", f"indices in [0, {a.shape[-1]})", (int(indices.min()), int(indices.max())))
    picked = np.take_along_axis(a.data, indices[..., None], axis=-1)[..., 0]

    def grad_fn(g: np.ndarray):
        full = np.zeros_like(a.data)
        np.put_along_axis(full, indices[..., None], g[..., None], axis=-1)
        return (full,)

    return make_node("gather", picked, (a,), grad_fn)


def concat(tensors: Sequence[ArrayLike], axis: int = -1) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError:
        raise DimensionError("concat", "conforming shapes", [p.shape for p in parts]) from None
    bounds = np.cumsum([0] + [p.shape[axis] for p in parts])

    def grad_fn(g: np.ndarray):
        return tuple(
            np.take(g, np.arange(bounds[k], bounds[k + 1]), axis=axis)
            for k in range(len(parts))
        )

    return make_node("concat", out, parts, grad_fn)


def stack(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    try:
        out = np.stack([p.data for p in parts], axis=axis)
    except ValueError:
        raise DimensionError("stack", "equal shapes", [p.shape for p in parts]) from None

    def grad_fn(g: np.ndarray):
        return tuple(np.take(g, k, axis=axis) for k in range(len(parts)))

    return make_node("stack", out, parts, grad_fn)
