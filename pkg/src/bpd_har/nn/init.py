"""Xavier-normal parameter initialization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatchError
from ..tensor import Tensor


@dataclass
class LayerParams:
    """Weights and bias of one layer."""

    weights: Tensor
    bias: Tensor


def fans(shape: tuple[int, ...]) -> tuple[int, int]:
    """(fan_in, fan_out) for a dense (in, out) or convolution (out, in, k) weight."""
    if len(shape) == 2:
        return shape[0], shape[1]
    if len(shape) == 3:
        out_channels, in_channels, k = shape
        return in_channels * k, out_channels * k
    raise ShapeMismatchError("init_params", f"unsupported weight rank {len(shape)}")


def xavier_std(fan_in: int, fan_out: int) -> float:
    if fan_in <= 0 or fan_out <= 0:
        raise ShapeMismatchError(
            "init_params", f"fan dimensions must be positive, got fan_in={fan_in} fan_out={fan_out}"
        )
    return math.sqrt(2.0 / (fan_in + fan_out))


def xavier_normal(
    shape: tuple[int, ...],
    rng: np.random.Generator,
    fan: tuple[int, int] | None = None,
    gain: float = 1.0,
) -> np.ndarray:
    fan_in, fan_out = fan if fan is not None else fans(shape)
    return rng.normal(0.0, gain * xavier_std(fan_in, fan_out), size=shape)


def init_params(
    weight_shape: tuple[int, ...], seed: int | np.random.Generator, gain: float = 1.0
) -> LayerParams:
    """Xavier-normal weights (std gain * sqrt(2/(fan_in+fan_out))) and zero bias.

    The bias length is the layer's output width: last axis for dense weights,
    first axis for convolution kernels.
    """
    if any(dim <= 0 for dim in weight_shape):
        raise ShapeMismatchError("init_params", f"zero dimension in weight shape {weight_shape}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    weights = xavier_normal(weight_shape, rng, gain=gain)
    out_width = weight_shape[-1] if len(weight_shape) == 2 else weight_shape[0]
    return LayerParams(
        weights=Tensor(weights, requires_grad=True),
        bias=Tensor(np.zeros(out_width), requires_grad=True),
    )
