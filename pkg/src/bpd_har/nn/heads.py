"""Disentanglers, classifiers, reconstructor and the statistics network."""

from __future__ import annotations

from ..errors import ShapeMismatchError
from ..schemas.common import HeadKind
from ..seeding import rng_for
from ..tensor import Tensor, ops
from .layers import BatchNorm1d, Component, Dropout, Linear

CLASSIFIER_HIDDEN = 128
MI_HIDDEN = 128
# initial logits stay near zero so untrained classifiers predict close to uniform
OUTPUT_GAIN = 0.01
# statistics network scores are squashed into (-SCORE_BOUND, SCORE_BOUND)
SCORE_BOUND = 10.0


class Head(Component):
    kind: HeadKind
    in_features: int

    def _check(self, x: Tensor) -> None:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatchError(
                "head_forward",
                f"{self.kind.value} '{self.name}' expects (n, {self.in_features}), got {x.shape}",
            )


class Disentangler(Head):
    """Dense layer followed by batch normalization; no activation."""

    kind = HeadKind.DISENTANGLER

    def __init__(self, name: str, latent_dim: int, seed: int) -> None:
        super().__init__(name)
        rng = rng_for(seed, name)
        self.in_features = latent_dim
        self.fc = Linear("fc", latent_dim, latent_dim, rng)
        self.bn = BatchNorm1d("bn", latent_dim)
        self.add_child("fc", self.fc)
        self.add_child("bn", self.bn)

    def forward(self, x: Tensor) -> Tensor:
        self._check(x)
        return self.bn(self.fc(x))


class Classifier(Head):
    """Dense, ReLU, dropout, dense; ``forward`` returns class probabilities."""

    kind = HeadKind.CLASSIFIER

    def __init__(
        self,
        name: str,
        latent_dim: int,
        class_count: int,
        seed: int,
        dropout_rate: float = 0.5,
        hidden: int = CLASSIFIER_HIDDEN,
    ) -> None:
        super().__init__(name)
        rng = rng_for(seed, name)
        self.in_features = latent_dim
        self.class_count = class_count
        self.fc1 = Linear("fc1", latent_dim, hidden, rng)
        self.drop = Dropout("dropout", dropout_rate, rng_for(seed, name, "dropout"))
        self.fc2 = Linear("fc2", hidden, class_count, rng, gain=OUTPUT_GAIN)
        for child in (self.fc1, self.drop, self.fc2):
            self.add_child(child.name, child)

    def logits(self, x: Tensor) -> Tensor:
        self._check(x)
        return self.fc2(self.drop(ops.relu(self.fc1(x))))

    def forward(self, x: Tensor) -> Tensor:
        return ops.softmax(self.logits(x))


class Reconstructor(Head):
    """Single dense layer from concat(z_sig, z_red) back to the encoder width."""

    kind = HeadKind.RECONSTRUCTOR

    def __init__(self, name: str, latent_dim: int, seed: int) -> None:
        super().__init__(name)
        self.in_features = 2 * latent_dim
        self.fc = Linear("fc", 2 * latent_dim, latent_dim, rng_for(seed, name))
        self.add_child("fc", self.fc)

    def forward(self, x: Tensor) -> Tensor:
        self._check(x)
        return self.fc(x)


class MiNetwork(Head):
    """Statistics network scoring concatenated (z_sig, z_red) pairs, one scalar each.

    Scores pass through a scaled tanh, so the Donsker-Varadhan bound built on
    them stays within [-2 * SCORE_BOUND, 2 * SCORE_BOUND] whichever way it is
    optimized.
    """

    kind = HeadKind.MI_NETWORK

    def __init__(
        self, name: str, latent_dim: int, seed: int, hidden: int = MI_HIDDEN, bound: float = SCORE_BOUND
    ) -> None:
        super().__init__(name)
        rng = rng_for(seed, name)
        self.bound = bound
        self.in_features = 2 * latent_dim
        self.fc1 = Linear("fc1", 2 * latent_dim, hidden, rng)
        self.fc2 = Linear("fc2", hidden, 1, rng)
        self.add_child("fc1", self.fc1)
        self.add_child("fc2", self.fc2)

    def forward(self, x: Tensor) -> Tensor:
        self._check(x)
        raw = self.fc2(ops.relu(self.fc1(x)))
        return ops.scale(ops.tanh(ops.scale(raw, 1.0 / self.bound)), self.bound)

    def score(self, z_sig: Tensor, z_red: Tensor) -> Tensor:
        return self(ops.concat([z_sig, z_red], axis=-1))


def build_head(
    kind: HeadKind,
    name: str,
    latent_dim: int,
    seed: int,
    class_count: int = 2,
    dropout_rate: float = 0.5,
) -> Head:
    if kind is HeadKind.DISENTANGLER:
        return Disentangler(name, latent_dim, seed)
    if kind is HeadKind.CLASSIFIER:
        return Classifier(name, latent_dim, class_count, seed, dropout_rate)
    if kind is HeadKind.RECONSTRUCTOR:
        return Reconstructor(name, latent_dim, seed)
    return MiNetwork(name, latent_dim, seed)


def head_forward(head: Head, x: Tensor, training: bool = False) -> Tensor:
    """Apply a head in the requested mode after checking its input width."""
    head.train(training)
    return head(x)
