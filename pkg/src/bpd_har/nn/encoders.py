"""CNN and DeepConvLSTM-style encoders producing E(x)."""

from __future__ import annotations

import logging

from ..errors import ShapeMismatchError
from ..schemas.common import EncoderKind
from ..schemas.model import EncoderSpec
from ..seeding import rng_for
from ..tensor import Tensor, ops
from .layers import Component, Conv1d, Linear, Lstm

logger = logging.getLogger(__name__)

CNN_BLOCKS = 3
CNN_POOL = 2
CONVLSTM_CONVS = 4
CONVLSTM_LAYERS = 2


class Encoder(Component):
    """Base class checking the (n, channels, window) input contract."""

    def __init__(self, spec: EncoderSpec) -> None:
        super().__init__("encoder")
        self.spec = spec

    def _check(self, batch: Tensor) -> None:
        expected = (self.spec.input_channels, self.spec.window_length)
        if batch.ndim != 3 or batch.shape[1:] != expected:
            raise ShapeMismatchError(
                "encoder_forward",
                f"expected (n, {expected[0]}, {expected[1]}) segments, got {batch.shape}",
            )


class CnnEncoder(Encoder):
    """Three conv/ReLU/max-pool blocks over time, flatten, one dense layer."""

    def __init__(self, spec: EncoderSpec, seed: int) -> None:
        super().__init__(spec)
        rng = rng_for(seed, "encoder", spec.kind.value)
        steps = spec.window_length
        channels = spec.input_channels
        self.blocks: list[Conv1d] = []
        for block in range(CNN_BLOCKS):
            conv = Conv1d(f"conv{block}", channels, spec.filters, spec.kernel_size, rng)
            self.blocks.append(self.add_child(f"conv{block}", conv))  # type: ignore[arg-type]
            channels = spec.filters
            steps = (steps - spec.kernel_size + 1) // CNN_POOL
            if steps < 1:
                raise ShapeMismatchError(
                    "encoder_forward",
                    f"window {spec.window_length} too short for {CNN_BLOCKS} conv blocks",
                )
        self.flat_features = channels * steps
        self.project = Linear("project", self.flat_features, spec.latent, rng)
        self.add_child("project", self.project)

    def forward(self, batch: Tensor) -> Tensor:
        self._check(batch)
        h = batch
        for conv in self.blocks:
            h = ops.max_pool1d(ops.relu(conv(h)), CNN_POOL)
        h = ops.reshape(h, (h.shape[0], self.flat_features))
        return self.project(h)


class ConvLstmEncoder(Encoder):
    """Four conv/ReLU layers, a two-layer LSTM, and a projection of the last state."""

    def __init__(self, spec: EncoderSpec, seed: int) -> None:
        super().__init__(spec)
        rng = rng_for(seed, "encoder", spec.kind.value)
        steps = spec.window_length
        channels = spec.input_channels
        self.convs: list[Conv1d] = []
        for layer in range(CONVLSTM_CONVS):
            conv = Conv1d(f"conv{layer}", channels, spec.filters, spec.kernel_size, rng)
            self.convs.append(self.add_child(f"conv{layer}", conv))  # type: ignore[arg-type]
            channels = spec.filters
            steps -= spec.kernel_size - 1
        if steps < 1:
            raise ShapeMismatchError(
                "encoder_forward",
                f"window {spec.window_length} too short for {CONVLSTM_CONVS} convolutions",
            )
        self.lstm = Lstm("lstm", channels, spec.lstm_hidden, CONVLSTM_LAYERS, rng)
        self.add_child("lstm", self.lstm)
        self.project = Linear("project", spec.lstm_hidden, spec.latent, rng)
        self.add_child("project", self.project)

    def forward(self, batch: Tensor) -> Tensor:
        self._check(batch)
        h = batch
        for conv in self.convs:
            h = ops.relu(conv(h))
        return self.project(self.lstm(h))


def build_encoder(spec: EncoderSpec, seed: int) -> Encoder:
    if spec.kind is EncoderKind.CNN:
        return CnnEncoder(spec, seed)
    return ConvLstmEncoder(spec, seed)


def encoder_forward(encoder: Encoder, batch: Tensor, training: bool = False) -> Tensor:
    """E(x) for a (n, channels, window) batch; the flag selects train or eval mode."""
    encoder.train(training)
    return encoder(batch)
