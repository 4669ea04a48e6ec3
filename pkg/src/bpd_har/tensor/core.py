"""Tensor storage and the reverse-mode computation record."""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import GraphError

logger = logging.getLogger(__name__)

BackwardFn = Callable[[Sequence[np.ndarray]], Sequence[np.ndarray | None]]

_state = threading.local()


def _records() -> list[ComputationRecord]:
    if not hasattr(_state, "records"):
        _state.records = []
    return _state.records


def get_default_dtype() -> np.dtype:
    """Floating point type used for newly created tensors on this thread."""
    return getattr(_state, "dtype", np.dtype(np.float32))


@contextmanager
def default_dtype(dtype: Any) -> Iterator[None]:
    """Temporarily switch the precision of new tensors (64-bit for grad checks)."""
    previous = get_default_dtype()
    _state.dtype = np.dtype(dtype)
    try:
        yield
    finally:
        _state.dtype = previous


class Tensor:
    """Dense n-dimensional array that can take part in a computation record."""

    __slots__ = ("data", "requires_grad", "grad", "name")

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        name: str | None = None,
        dtype: Any = None,
    ) -> None:
        self.data: np.ndarray = np.asarray(
            data, dtype=get_default_dtype() if dtype is None else dtype
        )
        self.requires_grad = requires_grad
        self.grad: Tensor | None = None
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def item(self) -> float:
        if self.data.size != 1:
            raise GraphError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> Tensor:
        """Same values, cut off from any record."""
        return Tensor(self.data, dtype=self.data.dtype)

    def zero_grad(self) -> None:
        self.grad = None

    def __add__(self, other: Any) -> Tensor:
        from .ops import add

        return add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        from .ops import add

        return add(other, self)

    def __sub__(self, other: Any) -> Tensor:
        from .ops import sub

        return sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        from .ops import sub

        return sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        from .ops import mul

        return mul(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        from .ops import mul

        return mul(other, self)

    def __neg__(self) -> Tensor:
        from .ops import mul

        return mul(self, -1.0)

    def __matmul__(self, other: Tensor) -> Tensor:
        from .ops import matmul

        return matmul(self, other)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return (
            f"Tensor(shape={self.shape}, dtype={self.dtype}, "
            f"requires_grad={self.requires_grad}{label})"
        )


@dataclass(eq=False)
class Node:
    """One primitive application: inputs, outputs and the vector-Jacobian product."""

    primitive: str
    inputs: tuple[Tensor, ...]
    outputs: tuple[Tensor, ...]
    backward_fn: BackwardFn


class ComputationRecord:
    """Topologically ordered record of primitive applications.

    Used as a context manager; primitives evaluated inside the ``with`` block on
    tensors that require gradients are appended in evaluation order.
    """

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self._produced: set[int] = set()

    def __enter__(self) -> ComputationRecord:
        _records().append(self)
        return self

    def __exit__(self, *exc: object) -> None:
        stack = _records()
        if stack and stack[-1] is self:
            stack.pop()
        elif self in stack:
            stack.remove(self)

    def __len__(self) -> int:
        return len(self.nodes)

    def append(self, node: Node) -> None:
        self.nodes.append(node)
        for out in node.outputs:
            self._produced.add(id(out))

    def reset(self) -> None:
        self.nodes.clear()
        self._produced.clear()

    def backward(self, root: Tensor) -> None:
        """Accumulate d(root)/d(t) into ``t.grad`` for every reachable tensor ``t``."""
        if root.size != 1:
            raise GraphError(f"backward needs a scalar root, got shape {root.shape}")
        if id(root) not in self._produced:
            raise GraphError("backward root was not produced under this record")

        grads: dict[int, np.ndarray] = {id(root): np.ones_like(root.data)}
        reached: dict[int, Tensor] = {id(root): root}

        for node in reversed(self.nodes):
            out_grads = [grads.get(id(out)) for out in node.outputs]
            if all(g is None for g in out_grads):
                continue
            filled = [
                np.zeros_like(out.data) if g is None else g
                for out, g in zip(node.outputs, out_grads)
            ]
            in_grads = node.backward_fn(filled)
            for tensor, g in zip(node.inputs, in_grads):
                if g is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + g
                else:
                    grads[key] = np.asarray(g)
                    reached[key] = tensor

        for key, tensor in reached.items():
            g = grads[key].reshape(tensor.shape).astype(tensor.dtype, copy=False)
            if tensor.grad is None:
                tensor.grad = Tensor(g.copy(), dtype=tensor.dtype)
            else:
                tensor.grad = Tensor(tensor.grad.data + g, dtype=tensor.dtype)


def active_record() -> ComputationRecord | None:
    """Innermost record entered on this thread, if any."""
    stack = _records()
    return stack[-1] if stack else None


def backward(root: Tensor) -> None:
    """Run reverse-mode differentiation from ``root`` through the active record."""
    record = active_record()
    if record is None:
        raise GraphError("backward called with no active computation record")
    record.backward(root)


def emit(
    primitive: str,
    inputs: Sequence[Tensor],
    outputs: Sequence[np.ndarray],
    backward_fn: BackwardFn,
) -> tuple[Tensor, ...]:
    """Wrap primitive results as tensors and record them when gradients flow."""
    record = active_record()
    track = record is not None and any(t.requires_grad for t in inputs)
    results = tuple(Tensor(out, requires_grad=track, dtype=out.dtype) for out in outputs)
    if track:
        assert record is not None
        record.append(Node(primitive, tuple(inputs), results, backward_fn))
    return results
