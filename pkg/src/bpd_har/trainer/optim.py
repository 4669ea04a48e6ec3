"""Adam with bias correction, one state per component group."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ..errors import GraphError, ShapeMismatchError
from ..nn import Component

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class OptimizerState:
    """First and second moments per parameter name plus the step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = BETA1
    beta2: float = BETA2
    eps: float = EPSILON

    def copy(self) -> OptimizerState:
        return OptimizerState(
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
            step=self.step,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


def adam_step(
    state: OptimizerState,
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray | None],
    lr: float,
) -> tuple[dict[str, np.ndarray], OptimizerState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    new = state.copy()
    new.step += 1
    bc1 = 1.0 - new.beta1**new.step
    bc2 = 1.0 - new.beta2**new.step

    updated: dict[str, np.ndarray] = {}
    for name, value in params.items():
        g = grads.get(name)
        if g is None:
            raise GraphError(f"adam_step: no gradient for registered parameter '{name}'")
        if g.shape != value.shape:
            raise ShapeMismatchError("adam_step", f"'{name}' gradient {g.shape} vs parameter {value.shape}")
        m = new.m.get(name, np.zeros_like(value))
        v = new.v.get(name, np.zeros_like(value))
        m = new.beta1 * m + (1.0 - new.beta1) * g
        v = new.beta2 * v + (1.0 - new.beta2) * (g * g)
        new.m[name] = m.astype(value.dtype, copy=False)
        new.v[name] = v.astype(value.dtype, copy=False)
        denom = np.sqrt(v / bc2) + new.eps
        updated[name] = (value - lr * (m / bc1) / denom).astype(value.dtype, copy=False)
    return updated, new


class Adam:
    """Applies ``adam_step`` in place to every parameter of one component."""

    def __init__(self, component: Component, lr: float) -> None:
        self.component = component
        self.lr = lr
        self.state = OptimizerState()

    def step(self, sign: float = 1.0) -> None:
        """Descend on the recorded gradients; ``sign=-1`` ascends instead."""
        tensors = self.component.parameters()
        params = {name: t.data for name, t in tensors.items()}
        grads = {
            name: None if t.grad is None else sign * t.grad.data for name, t in tensors.items()
        }
        updated, self.state = adam_step(self.state, params, grads, self.lr)
        for name, tensor in tensors.items():
            tensor.data = updated[name]

    def zero_grad(self) -> None:
        self.component.zero_grad()
