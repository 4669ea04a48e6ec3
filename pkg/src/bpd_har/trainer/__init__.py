"""Adam, the four-phase update, the epoch loop and checkpoints."""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .fit import FitResult, epoch_batches, fit, validation_f1
from .optim import Adam, OptimizerState, adam_step
from .phases import PHASE_GROUPS, StepLosses, baseline_step, make_optimizers, mean_entropy, train_step

__all__ = [
    "PHASE_GROUPS",
    "Adam",
    "Checkpoint",
    "FitResult",
    "OptimizerState",
    "StepLosses",
    "adam_step",
    "baseline_step",
    "epoch_batches",
    "fit",
    "load_checkpoint",
    "make_optimizers",
    "mean_entropy",
    "save_checkpoint",
    "train_step",
    "validation_f1",
]
