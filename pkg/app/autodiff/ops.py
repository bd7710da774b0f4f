"""Differentiable operations on 2-D tensors.

Each op computes its forward value with numpy and returns a closure that maps
the output gradient to one gradient per input. Shapes must match exactly;
the only broadcast is ``add_bias`` of a ``(1, c)`` row.
"""

from typing import Optional, Sequence

import numpy as np

from app.autodiff.tensor import Tensor
from exceptions.exceptions import ShapeException

NORM_EPS = 1e-12
LAYER_NORM_EPS = 1e-5


def _same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeException(op, a.shape, b.shape)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise ``a + b``."""
    _same_shape("add", a, b)
    return Tensor.from_op(a.data + b.data, (a, b), lambda g: (g, g), "add")


def subtract(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise ``a - b``."""
    _same_shape("subtract", a, b)
    return Tensor.from_op(a.data - b.data, (a, b), lambda g: (g, -g), "subtract")


def multiply(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise ``a * b``."""
    _same_shape("multiply", a, b)
    return Tensor.from_op(
        a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data), "multiply"
    )


def scale(a: Tensor, factor: float) -> Tensor:
    """Scalar multiple."""
    return Tensor.from_op(a.data * factor, (a,), lambda g: (g * factor,), "scale")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product ``a @ b``."""
    if a.shape[1] != b.shape[0]:
        raise ShapeException("matmul", a.shape, b.shape)
    return Tensor.from_op(
        a.data @ b.data,
        (a, b),
        lambda g: (g @ b.data.T, a.data.T @ g),
        "matmul",
    )


def transpose(a: Tensor) -> Tensor:
    """Transpose."""
    return Tensor.from_op(a.data.T.copy(), (a,), lambda g: (g.T,), "transpose")


def add_bias(x: Tensor, bias: Tensor) -> Tensor:
    """Add a ``(1, c)`` row to every row of ``x``."""
    if bias.shape != (1, x.shape[1]):
        raise ShapeException("add_bias", x.shape, bias.shape)
    return Tensor.from_op(
        x.data + bias.data,
        (x, bias),
        lambda g: (g, g.sum(axis=0, keepdims=True)),
        "add_bias",
    )


def concat_rows(parts: Sequence[Tensor]) -> Tensor:
    """Stack tensors vertically."""
    cols = {p.shape[1] for p in parts}
    if len(cols) != 1:
        raise ShapeException("concat_rows", *(p.shape for p in parts))
    bounds = np.cumsum([0] + [p.shape[0] for p in parts])

    def backward(g):
        return tuple(g[bounds[k] : bounds[k + 1]] for k in range(len(parts)))

    return Tensor.from_op(
        np.concatenate([p.data for p in parts], axis=0),
        tuple(parts),
        backward,
        "concat_rows",
    )


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    """Stack tensors horizontally."""
    rows = {p.shape[0] for p in parts}
    if len(rows) != 1:
        raise ShapeException("concat_cols", *(p.shape for p in parts))
    bounds = np.cumsum([0] + [p.shape[1] for p in parts])

    def backward(g):
        return tuple(g[:, bounds[k] : bounds[k + 1]] for k in range(len(parts)))

    return Tensor.from_op(
        np.concatenate([p.data for p in parts], axis=1),
        tuple(parts),
        backward,
        "concat_cols",
    )


def slice_rows(a: Tensor, start: int, stop: int) -> Tensor:
    """Rows ``start:stop``."""
    if not 0 <= start <= stop <= a.shape[0]:
        raise ShapeException("slice_rows", a.shape, (start, stop))

    def backward(g):
        full = np.zeros_like(a.data)
        full[start:stop] = g
        return (full,)

    return Tensor.from_op(a.data[start:stop].copy(), (a,), backward, "slice_rows")


def slice_cols(a: Tensor, start: int, stop: int) -> Tensor:
    """Columns ``start:stop``."""
    if not 0 <= start <= stop <= a.shape[1]:
        raise ShapeException("slice_cols", a.shape, (start, stop))

    def backward(g):
        full = np.zeros_like(a.data)
        full[:, start:stop] = g
        return (full,)

    return Tensor.from_op(a.data[:, start:stop].copy(), (a,), backward, "slice_cols")


def gather_rows(a: Tensor, indices: Sequence[int]) -> Tensor:
    """Rows picked by index, repeats allowed."""
    index = np.asarray(indices, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= a.shape[0]):
        raise ShapeException("gather_rows", a.shape, (int(index.max()),))

    def backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    picked = a.data[index].reshape(len(index), a.shape[1])
    return Tensor.from_op(picked, (a,), backward, "gather_rows")


def softmax_rows(a: Tensor) -> Tensor:
    """Row-wise softmax with max subtraction."""
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    out = exp / exp.sum(axis=1, keepdims=True)

    def backward(g):
        return (out * (g - np.sum(g * out, axis=1, keepdims=True)),)

    return Tensor.from_op(out, (a,), backward, "softmax_rows")


def sigmoid(a: Tensor) -> Tensor:
    """Logistic function."""
    out = np.empty_like(a.data)
    positive = a.data >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-a.data[positive]))
    exp = np.exp(a.data[~positive])
    out[~positive] = exp / (1.0 + exp)
    return Tensor.from_op(out, (a,), lambda g: (g * out * (1.0 - out),), "sigmoid")


def relu(a: Tensor) -> Tensor:
    """Rectifier; the subgradient at zero is zero."""
    active = a.data > 0
    return Tensor.from_op(a.data * active, (a,), lambda g: (g * active,), "relu")


def silu(a: Tensor) -> Tensor:
    """``x * sigmoid(x)``."""
    return multiply(a, sigmoid(a))


def exp(a: Tensor) -> Tensor:
    """Elementwise exponential."""
    out = np.exp(a.data)
    return Tensor.from_op(out, (a,), lambda g: (g * out,), "exp")


def log(a: Tensor) -> Tensor:
    """Elementwise natural log; non-positive inputs trip the numeric check."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(a.data)
    return Tensor.from_op(out, (a,), lambda g: (g / a.data,), "log")


def sum(a: Tensor, axis: Optional[int] = None) -> Tensor:  # noqa: A001
    """Sum of all entries (1x1), of columns (axis 0) or of rows (axis 1)."""
    if axis is None:
        return Tensor.from_op(
            np.array([[a.data.sum()]]),
            (a,),
            lambda g: (np.full_like(a.data, g[0, 0]),),
            "sum",
        )
    out = a.data.sum(axis=axis, keepdims=True)
    return Tensor.from_op(
        out, (a,), lambda g: (np.broadcast_to(g, a.data.shape).copy(),), "sum"
    )


def mean(a: Tensor, axis: Optional[int] = None) -> Tensor:
    """Mean of all entries, of columns (axis 0) or of rows (axis 1)."""
    count = a.data.size if axis is None else a.shape[axis]
    if count == 0:
        raise ShapeException("mean", a.shape)
    return scale(sum(a, axis), 1.0 / count)


def l2_normalize_rows(a: Tensor) -> Tensor:
    """Scale each row to unit Euclidean norm."""
    norm = np.sqrt(np.sum(a.data * a.data, axis=1, keepdims=True) + NORM_EPS**2)
    out = a.data / norm

    def backward(g):
        return ((g - out * np.sum(g * out, axis=1, keepdims=True)) / norm,)

    return Tensor.from_op(out, (a,), backward, "l2_normalize_rows")


def layer_norm(
    x: Tensor, gain: Tensor, bias: Tensor, eps: float = LAYER_NORM_EPS
) -> Tensor:
    """Normalize each row to zero mean and unit variance, then scale and shift."""
    cols = x.shape[1]
    if gain.shape != (1, cols) or bias.shape != (1, cols):
        raise ShapeException("layer_norm", x.shape, gain.shape, bias.shape)
    centered = x.data - x.data.mean(axis=1, keepdims=True)
    std = np.sqrt(np.mean(centered * centered, axis=1, keepdims=True) + eps)
    normalized = centered / std

    def backward(g):
        d_norm = g * gain.data
        d_x = (
            d_norm
            - d_norm.mean(axis=1, keepdims=True)
            - normalized * np.mean(d_norm * normalized, axis=1, keepdims=True)
        ) / std
        return (
            d_x,
            np.sum(g * normalized, axis=0, keepdims=True),
            g.sum(axis=0, keepdims=True),
        )

    return Tensor.from_op(
        normalized * gain.data + bias.data, (x, gain, bias), backward, "layer_norm"
    )


def dropout(
    x: Tensor, rate: float, rng: Optional[np.random.Generator], training: bool
) -> Tensor:
    """Inverted dropout; the identity outside training."""
    if not training or rate <= 0.0 or rng is None:
        return x
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return Tensor.from_op(x.data * keep, (x,), lambda g: (g * keep,), "dropout")


def broadcast_rows(column: Tensor, cols: int) -> Tensor:
    """Repeat an ``(n, 1)`` column ``cols`` times via a matrix product."""
    if column.shape[1] != 1:
        raise ShapeException("broadcast_rows", column.shape, (column.shape[0], 1))
    return matmul(column, Tensor(np.ones((1, cols))))
