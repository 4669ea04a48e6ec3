"""Stand-alone mutual-information estimate from paired samples."""

from __future__ import annotations

import logging

import numpy as np

from .errors import ShapeMismatchError
from .losses import mine_loss, shuffle_permutation
from .nn import MiNetwork
from .seeding import combined_seed, rng_for
from .tensor import ComputationRecord, Tensor
from .trainer.optim import Adam

logger = logging.getLogger(__name__)


def _as_pairs(x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float32)
    z = np.asarray(z, dtype=np.float32)
    x = x[:, None] if x.ndim == 1 else x
    z = z[:, None] if z.ndim == 1 else z
    if x.ndim != 2 or x.shape != z.shape:
        raise ShapeMismatchError("estimate_mutual_information", f"x {x.shape} and z {z.shape} must match")
    if x.shape[0] < 2:
        raise ShapeMismatchError("estimate_mutual_information", "needs at least 2 samples")
    return x, z


def estimate_mutual_information(
    x: np.ndarray,
    z: np.ndarray,
    steps: int = 3000,
    batch_size: int = 512,
    lr: float = 1e-3,
    seed: int = 0,
) -> float:
    """Lower-bound estimate of I(x; z) in nats.

    A fresh statistics network is trained to maximize the Donsker-Varadhan bound
    on mini-batches, then the bound is evaluated once on the whole sample.
    """
    x, z = _as_pairs(x, z)
    n = x.shape[0]
    batch = min(batch_size, n)
    net = MiNetwork("mi_estimator", x.shape[1], combined_seed(seed, "mi_estimator"))
    optimizer = Adam(net, lr)
    rng = rng_for(seed, "mi_batches")

    for step in range(steps):
        idx = rng.choice(n, size=batch, replace=False)
        with ComputationRecord() as record:
            bound = mine_loss(net, Tensor(x[idx]), Tensor(z[idx]), shuffle_permutation(batch, rng))
            net.zero_grad()
            record.backward(bound)
        optimizer.step(sign=-1.0)
        if (step + 1) % 500 == 0:
            logger.debug(f"mi estimator step {step + 1}: bound={bound.item():.4f}")

    perm = shuffle_permutation(n, rng_for(seed, "mi_eval"))
    estimate = mine_loss(net, Tensor(x), Tensor(z), perm).item()
    logger.info(f"MI estimate {estimate:.4f} nats from {n} pairs after {steps} steps")
    return estimate
