"""Training objectives: dual cross-entropy, negative entropy, reconstruction, MINE bound.

All logarithms are natural; probabilities are clamped at ``PROB_FLOOR`` before
every log.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel

from .errors import ShapeMismatchError
from .nn.heads import MiNetwork
from .schemas.common import NeForm
from .tensor import Tensor, ops

PROB_FLOOR = 1e-12


class LossValues(BaseModel):
    """Scalar values of the four objectives for one mini-batch."""

    ce: float
    ne: float
    recon: float
    mine: float


def _zero_based(labels: np.ndarray | Sequence[int], class_count: int) -> np.ndarray:
    idx = np.asarray(labels, dtype=np.int64) - 1
    if idx.size and (idx.min() < 0 or idx.max() >= class_count):
        raise ShapeMismatchError("labels", f"labels must lie in [1, {class_count}]")
    return idx


def _safe_log(p: Tensor) -> Tensor:
    return ops.log(ops.clamp_min(p, PROB_FLOOR))


def class_nll(probs: Tensor, labels: np.ndarray | Sequence[int]) -> Tensor:
    """-(1/N) sum_i log p[i, y_i] for 1-based labels."""
    idx = _zero_based(labels, probs.shape[1])
    return ops.scale(ops.mean(ops.pick(_safe_log(probs), idx)), -1.0)


def ce_loss(p_sig: Tensor, p_red: Tensor, labels: np.ndarray | Sequence[int]) -> Tensor:
    """Both classifier branches supervised by the same activity labels."""
    if p_sig.shape != p_red.shape:
        raise ShapeMismatchError("ce_loss", f"branch shapes differ: {p_sig.shape} vs {p_red.shape}")
    return ops.add(class_nll(p_sig, labels), class_nll(p_red, labels))


def ne_loss(
    p_red: Tensor,
    labels: np.ndarray | Sequence[int] | None = None,
    form: NeForm = NeForm.ENTROPY,
) -> Tensor:
    """Mean negative Shannon entropy of C' outputs, in [-ln K, 0].

    ``form=true_class`` evaluates the printed reading instead: the mean negative
    log-probability of the true class (needs ``labels``).
    """
    if form is NeForm.TRUE_CLASS:
        if labels is None:
            raise ValueError("ne_loss(form=true_class) needs labels")
        return class_nll(p_red, labels)
    plogp = ops.mul(p_red, _safe_log(p_red))
    return ops.mean(ops.sum(plogp, axis=1))


def recon_loss(enc: Tensor, recon: Tensor) -> Tensor:
    """(1/N) sum_i ||enc_i - recon_i||_2."""
    if enc.shape != recon.shape:
        raise ShapeMismatchError("recon_loss", f"{enc.shape} vs {recon.shape}")
    diff = ops.sub(enc, recon)
    return ops.mean(ops.sqrt(ops.sum(ops.square(diff), axis=1)))


def mine_loss(
    mi_net: MiNetwork,
    z_sig: Tensor,
    z_red: Tensor,
    permutation: np.ndarray | Sequence[int],
) -> Tensor:
    """Donsker-Varadhan bound: mean M(joint) - log mean exp M(shuffled).

    ``permutation`` indexes z_red to form the marginal samples; the log-mean-exp
    subtracts the batch maximum for stability.
    """
    n = z_sig.shape[0]
    if n < 2:
        raise ShapeMismatchError("mine_loss", f"needs at least 2 pairs, got {n}")
    perm = np.asarray(permutation, dtype=np.int64)
    if perm.shape != (n,):
        raise ShapeMismatchError("mine_loss", f"permutation length {perm.size} != batch {n}")

    joint = mi_net.score(z_sig, z_red)
    marginal = mi_net.score(z_sig, ops.gather_rows(z_red, perm))
    return ops.sub(ops.mean(joint), log_mean_exp(marginal))


def log_mean_exp(x: Tensor) -> Tensor:
    peak = float(x.data.max())
    shifted = ops.exp(ops.sub(x, peak))
    return ops.add(ops.log(ops.mean(shifted)), peak)


def shuffle_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n)
