"""Epoch loop with seeded shuffling, per-epoch logs and early stopping."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np

from ..config import TrainConfig
from ..data.dataset import SegmentDataset
from ..errors import EmptyDatasetError, ShapeMismatchError
from ..metrics.f1 import confusion, score_f1
from ..model import BaselineNetworks, BpdNetworks, Networks, infer
from ..schemas.common import F1Average
from ..schemas.report import EpochLog
from ..seeding import combined_seed, rng_for
from ..tensor import Tensor
from .optim import Adam
from .phases import StepLosses, baseline_step, make_optimizers, train_step

logger = logging.getLogger(__name__)

MIN_BATCH = 2

EpochCallback = Callable[[EpochLog], None]


@dataclass
class FitResult:
    nets: Networks
    logs: list[EpochLog]
    optimizers: dict[str, Adam]
    stopped_early: bool = False
    best_epoch: int = 0
    monitor: list[float] = field(default_factory=list)


def epoch_batches(n: int, batch_size: int, seed: int, epoch: int) -> Iterator[np.ndarray]:
    """Index batches for one epoch; a trailing batch of fewer than 2 is dropped."""
    order = np.random.default_rng(combined_seed(seed, "epoch", epoch)).permutation(n)
    for start in range(0, n, batch_size):
        batch = order[start : start + batch_size]
        if len(batch) < MIN_BATCH:
            logger.warning(f"epoch {epoch}: dropping trailing batch of {len(batch)} segment")
            return
        yield batch


def _check_compatible(nets: Networks, data: SegmentDataset) -> None:
    spec = nets.spec
    if data.class_count != nets.class_count:
        raise ShapeMismatchError("fit", f"dataset has K={data.class_count}, networks K={nets.class_count}")
    if (data.channels, data.window_length) != (spec.input_channels, spec.window_length):
        raise ShapeMismatchError(
            "fit",
            f"dataset segments are ({data.channels}, {data.window_length}), "
            f"encoder expects ({spec.input_channels}, {spec.window_length})",
        )


def _mean(steps: list[StepLosses], key: str) -> float:
    return float(np.mean([getattr(s, key) for s in steps])) if steps else float("nan")


def validation_f1(nets: Networks, data: SegmentDataset, average: F1Average = F1Average.MACRO) -> float:
    predicted = infer(nets, data.segments)
    return score_f1(confusion(data.labels, predicted, nets.class_count), average)


def fit(
    nets: Networks,
    train_data: SegmentDataset,
    config: TrainConfig,
    validation: SegmentDataset | None = None,
    on_epoch: EpochCallback | None = None,
    optimizers: dict[str, Adam] | None = None,
) -> FitResult:
    """Train for up to ``max_epoch`` epochs, stopping once the monitor stalls.

    The monitor is validation macro-F1 when a validation set is given, otherwise
    the training ce + recon.
    """
    if len(train_data) < MIN_BATCH:
        raise EmptyDatasetError(f"training needs at least {MIN_BATCH} segments, got {len(train_data)}")
    _check_compatible(nets, train_data)
    if validation is not None and len(validation) == 0:
        validation = None

    optimizers = optimizers or make_optimizers(nets, config.lr)
    result = FitResult(nets=nets, logs=[], optimizers=optimizers)
    higher_is_better = validation is not None
    best = -np.inf if higher_is_better else np.inf
    stale = 0

    for epoch in range(1, config.max_epoch + 1):
        mine_rng = rng_for(config.seed, "mine", epoch)
        steps: list[StepLosses] = []
        for idx in epoch_batches(len(train_data), config.batch_size, config.seed, epoch):
            x = Tensor(train_data.segments[idx])
            labels = train_data.labels[idx]
            if isinstance(nets, BpdNetworks):
                steps.append(train_step(nets, x, labels, config, optimizers, mine_rng))
            else:
                assert isinstance(nets, BaselineNetworks)
                steps.append(baseline_step(nets, x, labels, config, optimizers))

        log = EpochLog(
            epoch=epoch,
            ce=_mean(steps, "ce"),
            ne=_mean(steps, "ne"),
            recon=_mean(steps, "recon"),
            mine=_mean(steps, "mine"),
            entropy=_mean(steps, "entropy"),
            batches=len(steps),
            val_f1=validation_f1(nets, validation) if validation is not None else None,
        )
        result.logs.append(log)
        if on_epoch is not None:
            on_epoch(log)
        logger.info(
            f"epoch {epoch}/{config.max_epoch}: ce={log.ce:.4f} ne={log.ne:.4f} "
            f"mine={log.mine:.4f} recon={log.recon:.4f} entropy={log.entropy:.4f}"
            + (f" val_f1={log.val_f1:.4f}" if log.val_f1 is not None else "")
        )

        current = log.val_f1 if log.val_f1 is not None else log.ce + log.recon
        result.monitor.append(current)
        if higher_is_better:
            improved = current > best + config.convergence_delta
        else:
            improved = current < best - config.convergence_delta
        if improved:
            best = current
            result.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.convergence_patience:
                logger.warning(
                    f"stopping at epoch {epoch}: no improvement above {config.convergence_delta} "
                    f"for {stale} epochs"
                )
                result.stopped_early = True
                break

    return result
