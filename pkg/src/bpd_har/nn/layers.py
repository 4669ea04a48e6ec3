"""Parameterized building blocks assembled from tensor primitives."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatchError
from ..tensor import Tensor, ops
from .init import LayerParams, init_params, xavier_normal


class Component:
    """A named group of trainable tensors, buffers and child components.

    ``calls`` counts forward invocations so tests can confirm which parts of a
    model an operation touches.
    """

    def __init__(self, name: str) -> None:
        self.name = name
        self.training = True
        self.calls = 0
        self._params: dict[str, Tensor] = {}
        self._buffers: dict[str, np.ndarray] = {}
        self._children: dict[str, Component] = {}

    def add_param(self, name: str, tensor: Tensor) -> Tensor:
        tensor.requires_grad = True
        tensor.name = f"{self.name}.{name}"
        self._params[name] = tensor
        return tensor

    def add_buffer(self, name: str, values: np.ndarray) -> np.ndarray:
        self._buffers[name] = values
        return values

    def add_child(self, name: str, child: Component) -> Component:
        self._children[name] = child
        return child

    def parameters(self) -> dict[str, Tensor]:
        """Trainable tensors keyed by dotted path, children included."""
        found = dict(self._params)
        for child_name, child in self._children.items():
            for key, tensor in child.parameters().items():
                found[f"{child_name}.{key}"] = tensor
        return found

    def buffers(self) -> dict[str, np.ndarray]:
        found = dict(self._buffers)
        for child_name, child in self._children.items():
            for key, values in child.buffers().items():
                found[f"{child_name}.{key}"] = values
        return found

    def parameter_count(self) -> int:
        return sum(t.size for t in self.parameters().values())

    def train(self, mode: bool = True) -> Component:
        self.training = mode
        for child in self._children.values():
            child.train(mode)
        return self

    def eval(self) -> Component:
        return self.train(False)

    def zero_grad(self) -> None:
        for tensor in self.parameters().values():
            tensor.zero_grad()

    def __call__(self, *args: Tensor) -> Tensor:
        self.calls += 1
        return self.forward(*args)

    def forward(self, *args: Tensor) -> Tensor:
        raise NotImplementedError


class Linear(Component):
    def __init__(
        self,
        name: str,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        gain: float = 1.0,
    ):
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features
        params: LayerParams = init_params((in_features, out_features), rng, gain)
        self.weight = self.add_param("weight", params.weights)
        self.bias = self.add_param("bias", params.bias)

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatchError(
                self.name, f"expected (n, {self.in_features}) input, got {x.shape}"
            )
        return ops.add(ops.matmul(x, self.weight), self.bias)


class Conv1d(Component):
    def __init__(
        self,
        name: str,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
    ):
        super().__init__(name)
        params = init_params((out_channels, in_channels, kernel_size), rng)
        self.kernel_size = kernel_size
        self.weight = self.add_param("weight", params.weights)
        self.bias = self.add_param("bias", params.bias)

    def forward(self, x: Tensor) -> Tensor:
        return ops.conv1d(x, self.weight, self.bias)


class BatchNorm1d(Component):
    """Batch normalization with EMA running statistics (momentum 0.1)."""

    def __init__(self, name: str, features: int, momentum: float = 0.1, eps: float = 1e-5):
        super().__init__(name)
        self.momentum = momentum
        self.eps = eps
        self.gamma = self.add_param("gamma", Tensor(np.ones(features)))
        self.beta = self.add_param("beta", Tensor(np.zeros(features)))
        self.running_mean = self.add_buffer("running_mean", np.zeros(features))
        self.running_var = self.add_buffer("running_var", np.ones(features))

    def forward(self, x: Tensor) -> Tensor:
        return ops.batch_norm(
            x,
            self.gamma,
            self.beta,
            self.running_mean,
            self.running_var,
            training=self.training,
            momentum=self.momentum,
            eps=self.eps,
        )


class Dropout(Component):
    def __init__(self, name: str, rate: float, rng: np.random.Generator):
        super().__init__(name)
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"{name}: dropout rate must lie in [0, 1), got {rate}")
        self.rate = rate
        self.rng = rng

    def forward(self, x: Tensor) -> Tensor:
        return ops.dropout(x, self.rate, self.rng, self.training)


class Lstm(Component):
    """Stacked LSTM over the time axis of a (n, features, T) tensor.

    Returns the last layer's hidden state at the final time step.
    """

    def __init__(
        self,
        name: str,
        input_size: int,
        hidden_size: int,
        num_layers: int,
        rng: np.random.Generator,
    ):
        super().__init__(name)
        self.hidden_size = hidden_size
        self.num_layers = num_layers
        for layer in range(num_layers):
            width = input_size if layer == 0 else hidden_size
            gates = 4 * hidden_size
            self.add_param(f"w_x{layer}", Tensor(xavier_normal((width, gates), rng)))
            self.add_param(
                f"w_h{layer}", Tensor(xavier_normal((hidden_size, gates), rng))
            )
            self.add_param(f"bias{layer}", Tensor(np.zeros(gates)))

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 3:
            raise ShapeMismatchError(self.name, f"expected (n, features, T), got {x.shape}")
        n = x.shape[0]
        zeros = np.zeros((n, self.hidden_size))
        h = [Tensor(zeros, dtype=x.dtype) for _ in range(self.num_layers)]
        c = [Tensor(zeros, dtype=x.dtype) for _ in range(self.num_layers)]
        for t in range(x.shape[2]):
            inp = ops.take(x, t, axis=2)
            for layer in range(self.num_layers):
                h[layer], c[layer] = ops.lstm_cell(
                    inp,
                    h[layer],
                    c[layer],
                    self._params[f"w_x{layer}"],
                    self._params[f"w_h{layer}"],
                    self._params[f"bias{layer}"],
                )
                inp = h[layer]
        return h[-1]
