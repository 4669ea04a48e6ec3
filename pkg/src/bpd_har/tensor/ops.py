"""Differentiable primitives.

Every primitive computes its result with numpy and, when a computation record is
active and an input requires gradients, registers a vector-Jacobian product.
Broadcasting is limited to a leading batch dimension: a binary operand may have
the full shape, the shape without its first axis, or be a 0-d scalar.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import NumericDomainError, ShapeMismatchError
from .core import Tensor, emit

Operand = Tensor | float | int


def _lift(value: Operand, like: Tensor | None = None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(value, dtype=dtype)


def _binary_operands(primitive: str, a: Operand, b: Operand) -> tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        ta, tb = a, _lift(b, a)
    else:
        tb = _lift(b)
        ta = _lift(a, tb)
    if ta.shape == tb.shape or ta.ndim == 0 or tb.ndim == 0:
        return ta, tb
    if ta.ndim == tb.ndim + 1 and ta.shape[1:] == tb.shape:
        return ta, tb
    if tb.ndim == ta.ndim + 1 and tb.shape[1:] == ta.shape:
        return ta, tb
    raise ShapeMismatchError(
        primitive,
        f"cannot broadcast {ta.shape} with {tb.shape}; "
        "only a leading batch dimension may be broadcast",
    )


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    if len(shape) == 0:
        return np.asarray(grad.sum())
    lead = grad.ndim - len(shape)
    return grad.sum(axis=tuple(range(lead))).reshape(shape)


# --- element-wise arithmetic ---


def add(a: Operand, b: Operand) -> Tensor:
    ta, tb = _binary_operands("add", a, b)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        (g,) = gs
        return _unbroadcast(g, ta.shape), _unbroadcast(g, tb.shape)

    return emit("add", (ta, tb), (ta.data + tb.data,), vjp)[0]


def sub(a: Operand, b: Operand) -> Tensor:
    ta, tb = _binary_operands("sub", a, b)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        (g,) = gs
        return _unbroadcast(g, ta.shape), _unbroadcast(-g, tb.shape)

    return emit("sub", (ta, tb), (ta.data - tb.data,), vjp)[0]


def mul(a: Operand, b: Operand) -> Tensor:
    ta, tb = _binary_operands("mul", a, b)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        (g,) = gs
        return (
            _unbroadcast(g * tb.data, ta.shape),
            _unbroadcast(g * ta.data, tb.shape),
        )

    return emit("mul", (ta, tb), (ta.data * tb.data,), vjp)[0]


def scale(x: Tensor, factor: float) -> Tensor:
    """Multiply by a constant."""
    return mul(x, factor)


def square(x: Tensor) -> Tensor:
    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] * 2.0 * x.data,)

    return emit("square", (x,), (x.data * x.data,), vjp)[0]


def sqrt(x: Tensor) -> Tensor:
    if np.any(x.data < 0):
        raise NumericDomainError(f"sqrt: negative input (min {x.data.min():.3g})")
    out = np.sqrt(x.data)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        # subgradient 0 at the origin keeps ||0|| differentiable
        safe = np.where(out > 0, out, 1.0)
        return (np.where(out > 0, gs[0] / (2.0 * safe), 0.0),)

    return emit("sqrt", (x,), (out,), vjp)[0]


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] * out,)

    return emit("exp", (x,), (out,), vjp)[0]


def log(x: Tensor) -> Tensor:
    if np.any(x.data <= 0):
        raise NumericDomainError(
            f"log: non-positive input (min {x.data.min():.3g}); clamp before taking logs"
        )

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] / x.data,)

    return emit("log", (x,), (np.log(x.data),), vjp)[0]


def clamp_min(x: Tensor, floor: float) -> Tensor:
    keep = x.data >= floor

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (np.where(keep, gs[0], 0.0),)

    return emit("clamp_min", (x,), (np.where(keep, x.data, floor).astype(x.dtype),), vjp)[0]


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] * mask,)

    return emit("relu", (x,), (x.data * mask,), vjp)[0]


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] * (1.0 - out * out),)

    return emit("tanh", (x,), (out,), vjp)[0]


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last (class) axis."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        g = gs[0]
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return emit("softmax", (x,), (out,), vjp)[0]


# --- reductions and shape plumbing ---


def sum(x: Tensor, axis: int | None = None) -> Tensor:  # noqa: A001
    out = np.asarray(x.data.sum(axis=axis))

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        g = gs[0] if axis is None else np.expand_dims(gs[0], axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return emit("sum", (x,), (out,), vjp)[0]


def mean(x: Tensor, axis: int | None = None) -> Tensor:
    count = x.size if axis is None else x.shape[axis]
    out = np.asarray(x.data.mean(axis=axis))

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        g = gs[0] if axis is None else np.expand_dims(gs[0], axis)
        return (np.broadcast_to(g / count, x.shape).copy(),)

    return emit("mean", (x,), (out,), vjp)[0]


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    """Concatenate along the feature axis; all other dimensions must agree."""
    if not tensors:
        raise ShapeMismatchError("concat", "no inputs")
    ref = tensors[0].shape
    for t in tensors[1:]:
        if t.ndim != len(ref) or np.delete(t.shape, axis).tolist() != np.delete(ref, axis).tolist():
            raise ShapeMismatchError(
                "concat", f"shapes {ref} and {t.shape} differ outside axis {axis}"
            )
    sizes = [t.shape[axis] for t in tensors]
    cuts = np.cumsum(sizes)[:-1]

    def vjp(gs: Sequence[np.ndarray]) -> list[np.ndarray]:
        return list(np.split(gs[0], cuts, axis=axis))

    out = np.concatenate([t.data for t in tensors], axis=axis)
    return emit("concat", tuple(tensors), (out,), vjp)[0]


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    try:
        out = x.data.reshape(shape)
    except ValueError as exc:
        raise ShapeMismatchError("reshape", f"cannot reshape {x.shape} to {shape}") from exc

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0].reshape(x.shape),)

    return emit("reshape", (x,), (out,), vjp)[0]


def take(x: Tensor, index: int, axis: int) -> Tensor:
    """Select one position along ``axis`` (used to step through time)."""
    if not -x.shape[axis] <= index < x.shape[axis]:
        raise ShapeMismatchError("take", f"index {index} out of range for axis {axis} of {x.shape}")

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        slicer: list[Any] = [slice(None)] * x.ndim
        slicer[axis] = index
        full[tuple(slicer)] = gs[0]
        return (full,)

    return emit("take", (x,), (np.take(x.data, index, axis=axis),), vjp)[0]


def gather_rows(x: Tensor, order: np.ndarray) -> Tensor:
    """Rows of ``x`` in the given order (repeats allowed)."""
    idx = np.asarray(order, dtype=np.int64)
    if idx.ndim != 1 or (idx.size and (idx.min() < -x.shape[0] or idx.max() >= x.shape[0])):
        raise ShapeMismatchError("gather_rows", f"row indices out of range for {x.shape}")

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        np.add.at(full, idx, gs[0])
        return (full,)

    return emit("gather_rows", (x,), (x.data[idx],), vjp)[0]


def pick(x: Tensor, indices: np.ndarray) -> Tensor:
    """Row-wise gather ``x[i, indices[i]]`` of a (n, K) tensor."""
    idx = np.asarray(indices, dtype=np.int64)
    if x.ndim != 2 or idx.shape != (x.shape[0],):
        raise ShapeMismatchError("pick", f"need (n, K) values and n indices, got {x.shape} and {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[1]):
        raise ShapeMismatchError("pick", f"class index out of range [0, {x.shape[1]})")
    rows = np.arange(x.shape[0])

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        full[rows, idx] = gs[0]
        return (full,)

    return emit("pick", (x,), (x.data[rows, idx],), vjp)[0]


# --- linear algebra and layers ---


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatchError("matmul", f"expects 2-D operands, got {a.shape} x {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(
            "matmul",
            f"inner dimensions differ: {a.shape} x {b.shape} ({a.shape[1]} != {b.shape[0]})",
        )

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        g = gs[0]
        return g @ b.data.T, a.data.T @ g

    return emit("matmul", (a, b), (a.data @ b.data,), vjp)[0]


def conv1d(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Valid 1-D convolution over time, stride 1.

    x: (n, c_in, T); weight: (c_out, c_in, k); bias: (c_out,) -> (n, c_out, T - k + 1)
    """
    if x.ndim != 3 or weight.ndim != 3:
        raise ShapeMismatchError("conv1d", f"expects (n, c, T) input and (o, c, k) kernel, got {x.shape}, {weight.shape}")
    n, channels, steps = x.shape
    out_channels, in_channels, k = weight.shape
    if channels != in_channels:
        raise ShapeMismatchError("conv1d", f"input has {channels} channels, kernel expects {in_channels}")
    if steps < k:
        raise ShapeMismatchError("conv1d", f"time axis {steps} shorter than kernel {k}")
    if bias.shape != (out_channels,):
        raise ShapeMismatchError("conv1d", f"bias shape {bias.shape} != ({out_channels},)")
    out_steps = steps - k + 1
    cols = sliding_window_view(x.data, k, axis=2)  # (n, c, T_out, k)
    out = np.tensordot(cols, weight.data, axes=([1, 3], [1, 2])).transpose(0, 2, 1)
    out = out + bias.data[None, :, None]

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g = gs[0]
        dw = np.tensordot(g, cols, axes=([0, 2], [0, 2]))
        db = g.sum(axis=(0, 2))
        dx = np.zeros_like(x.data)
        for j in range(k):
            dx[:, :, j : j + out_steps] += np.tensordot(g, weight.data[:, :, j], axes=([1], [0])).transpose(0, 2, 1)
        return dx, dw, db

    return emit("conv1d", (x, weight, bias), (np.ascontiguousarray(out),), vjp)[0]


def max_pool1d(x: Tensor, size: int) -> Tensor:
    """Non-overlapping max pooling over time; a trailing remainder is discarded."""
    if x.ndim != 3:
        raise ShapeMismatchError("max_pool1d", f"expects (n, c, T), got {x.shape}")
    n, channels, steps = x.shape
    pooled = steps // size
    if pooled == 0:
        raise ShapeMismatchError("max_pool1d", f"time axis {steps} shorter than pool {size}")
    blocks = x.data[:, :, : pooled * size].reshape(n, channels, pooled, size)
    winner = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, winner[..., None], axis=-1)[..., 0]

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        mask = np.zeros_like(blocks)
        np.put_along_axis(mask, winner[..., None], gs[0][..., None], axis=-1)
        dx = np.zeros_like(x.data)
        dx[:, :, : pooled * size] = mask.reshape(n, channels, pooled * size)
        return (dx,)

    return emit("max_pool1d", (x,), (out,), vjp)[0]


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Batch normalization over the batch axis of a (n, d) tensor.

    In training mode the running statistics are updated in place with an
    exponential moving average; evaluation mode reads them and is deterministic.
    """
    if x.ndim != 2 or gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
        raise ShapeMismatchError("batch_norm", f"input {x.shape}, gamma {gamma.shape}, beta {beta.shape}")
    n = x.shape[0]
    if training:
        mu = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        unbiased = var * n / (n - 1) if n > 1 else var
        running_mean *= 1.0 - momentum
        running_mean += momentum * mu
        running_var *= 1.0 - momentum
        running_var += momentum * unbiased
    else:
        mu = running_mean
        var = running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (x.data - mu) * inv_std
    out = (gamma.data * x_hat + beta.data).astype(x.dtype)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g = gs[0]
        dgamma = (g * x_hat).sum(axis=0)
        dbeta = g.sum(axis=0)
        dx_hat = g * gamma.data
        if training:
            dx = (inv_std / n) * (
                n * dx_hat - dx_hat.sum(axis=0) - x_hat * (dx_hat * x_hat).sum(axis=0)
            )
        else:
            dx = dx_hat * inv_std
        return dx, dgamma, dbeta

    return emit("batch_norm", (x, gamma, beta), (out,), vjp)[0]


def dropout(x: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; the identity in evaluation mode."""
    if not training or rate <= 0.0:
        return x
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    keep = keep.astype(x.dtype)

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray]:
        return (gs[0] * keep,)

    return emit("dropout", (x,), (x.data * keep,), vjp)[0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (np.tanh(0.5 * z) + 1.0)


def lstm_cell(
    x: Tensor,
    h: Tensor,
    c: Tensor,
    w_x: Tensor,
    w_h: Tensor,
    bias: Tensor,
) -> tuple[Tensor, Tensor]:
    """One LSTM step; gate blocks are ordered input, forget, candidate, output.

    x: (n, i); h, c: (n, H); w_x: (i, 4H); w_h: (H, 4H); bias: (4H,)
    """
    hidden = h.shape[1]
    if (
        x.ndim != 2
        or w_x.shape != (x.shape[1], 4 * hidden)
        or w_h.shape != (hidden, 4 * hidden)
        or bias.shape != (4 * hidden,)
        or c.shape != h.shape
        or h.shape[0] != x.shape[0]
    ):
        raise ShapeMismatchError(
            "lstm_cell",
            f"x {x.shape}, h {h.shape}, c {c.shape}, w_x {w_x.shape}, w_h {w_h.shape}, bias {bias.shape}",
        )
    z = x.data @ w_x.data + h.data @ w_h.data + bias.data
    i = _sigmoid(z[:, :hidden])
    f = _sigmoid(z[:, hidden : 2 * hidden])
    g = np.tanh(z[:, 2 * hidden : 3 * hidden])
    o = _sigmoid(z[:, 3 * hidden :])
    c_new = f * c.data + i * g
    tc = np.tanh(c_new)
    h_new = o * tc

    def vjp(gs: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
        dh, dc_out = gs
        dc = dc_out + dh * o * (1.0 - tc * tc)
        dz = np.concatenate(
            [
                dc * g * i * (1.0 - i),
                dc * c.data * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tc * o * (1.0 - o),
            ],
            axis=1,
        )
        return (
            dz @ w_x.data.T,
            dz @ w_h.data.T,
            dc * f,
            x.data.T @ dz,
            h.data.T @ dz,
            dz.sum(axis=0),
        )

    h_out, c_out = emit("lstm_cell", (x, h, c, w_x, w_h, bias), (h_new, c_new), vjp)
    return h_out, c_out
