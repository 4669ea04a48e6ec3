"""The four-phase BPD update and the cross-entropy-only baseline update.

Every phase recomputes its forward pass against the current parameters and
steps only the component groups it owns:

1. encoder, d_sig, d_red, c_sig, c_red on the dual cross-entropy
2. encoder, d_red on the negative entropy of c_red (classifiers frozen)
3. d_sig, d_red, mi_net on the MINE bound (encoder output held constant)
4. d_sig, d_red, reconstructor on the reconstruction loss (encoder untouched)
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence

import numpy as np

from ..config import TrainConfig
from ..errors import NonFiniteLossError
from ..losses import (
    PROB_FLOOR,
    LossValues,
    ce_loss,
    class_nll,
    mine_loss,
    ne_loss,
    recon_loss,
    shuffle_permutation,
)
from ..model import BaselineNetworks, BpdNetworks, Networks
from ..schemas.common import MineMode
from ..tensor import ComputationRecord, Tensor, ops
from .optim import Adam

logger = logging.getLogger(__name__)

PHASE_GROUPS: dict[str, tuple[str, ...]] = {
    "ce": ("encoder", "d_sig", "d_red", "c_sig", "c_red"),
    "ne": ("encoder", "d_red"),
    "mine": ("d_sig", "d_red", "mi_net"),
    "recon": ("d_sig", "d_red", "reconstructor"),
}


class StepLosses(LossValues):
    """Loss values of one train step plus the mean entropy of C' outputs."""

    entropy: float


def make_optimizers(nets: Networks, lr: float) -> dict[str, Adam]:
    return {name: Adam(component, lr) for name, component in nets.groups().items()}


def mean_entropy(probs: np.ndarray) -> float:
    """Mean Shannon entropy (nats) of probability rows."""
    p = np.clip(probs.astype(np.float64), PROB_FLOOR, 1.0)
    return float(np.mean(-np.sum(probs * np.log(p), axis=1)))


def _finite(phase: str, loss: Tensor) -> float:
    value = loss.item()
    if not np.isfinite(value):
        raise NonFiniteLossError(phase, value)
    return value


def _zero_all(nets: Networks) -> None:
    for component in nets.groups().values():
        component.zero_grad()


def _apply(
    phase: str,
    record: ComputationRecord,
    loss: Tensor,
    nets: Networks,
    optimizers: Mapping[str, Adam],
    groups: Sequence[str],
    signs: Mapping[str, float] | None = None,
) -> float:
    value = _finite(phase, loss)
    _zero_all(nets)
    record.backward(loss)
    for group in groups:
        optimizers[group].step((signs or {}).get(group, 1.0))
    return value


def train_step(
    nets: BpdNetworks,
    x: Tensor,
    labels: np.ndarray,
    config: TrainConfig,
    optimizers: Mapping[str, Adam],
    rng: np.random.Generator,
) -> StepLosses:
    """Run the four phases on one mini-batch and return the loss of each."""
    nets.set_mode("train")

    with ComputationRecord() as record:
        enc = nets.encoder(x)
        p_sig = nets.c_sig(nets.d_sig(enc))
        p_red = nets.c_red(nets.d_red(enc))
        ce = _apply("ce", record, ce_loss(p_sig, p_red, labels), nets, optimizers, PHASE_GROUPS["ce"])

    with ComputationRecord() as record:
        p_red = nets.c_red(nets.d_red(nets.encoder(x)))
        entropy = mean_entropy(p_red.data)
        ne_value = ne_loss(p_red, labels, config.ne_form)
        ne = _apply("ne", record, ne_value, nets, optimizers, PHASE_GROUPS["ne"])

    # phases 3 and 4 treat E(x) as a constant input
    enc_const = nets.encoder(x).detach()
    perm = shuffle_permutation(x.shape[0], rng)

    with ComputationRecord() as record:
        z_sig = nets.d_sig(enc_const)
        z_red = nets.d_red(enc_const)
        mine_value = mine_loss(nets.mi_net, z_sig, z_red, perm)
        if config.dependency_reduction:
            signs = {"mi_net": -1.0} if config.mine_mode is MineMode.MINIMAX else None
            mine = _apply("mine", record, mine_value, nets, optimizers, PHASE_GROUPS["mine"], signs)
        else:
            mine = _finite("mine", mine_value)

    with ComputationRecord() as record:
        z_sig = nets.d_sig(enc_const)
        z_red = nets.d_red(enc_const)
        recon_value = recon_loss(enc_const, nets.reconstructor(ops.concat([z_sig, z_red], axis=-1)))
        if config.reconstruction:
            recon = _apply("recon", record, recon_value, nets, optimizers, PHASE_GROUPS["recon"])
        else:
            recon = _finite("recon", recon_value)

    logger.debug(f"step ce={ce:.4f} ne={ne:.4f} mine={mine:.4f} recon={recon:.4f}")
    return StepLosses(ce=ce, ne=ne, recon=recon, mine=mine, entropy=entropy)


def baseline_step(
    nets: BaselineNetworks,
    x: Tensor,
    labels: np.ndarray,
    config: TrainConfig,
    optimizers: Mapping[str, Adam],
) -> StepLosses:
    """Single cross-entropy update of the encoder and its classifier."""
    nets.set_mode("train")
    with ComputationRecord() as record:
        probs = nets.classifier(nets.encoder(x))
        entropy = mean_entropy(probs.data)
        ce = _apply("ce", record, class_nll(probs, labels), nets, optimizers, ("encoder", "classifier"))
    return StepLosses(ce=ce, ne=0.0, recon=0.0, mine=0.0, entropy=entropy)
