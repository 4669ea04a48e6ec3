"""Finite-difference checks for the training objectives as composites."""

import numpy as np

from ..losses import ce_loss, class_nll, mine_loss, ne_loss, recon_loss
from ..nn import MiNetwork
from ..schemas.common import NeForm
from ..schemas.gradcheck import GradCheckResult
from ..tensor import Tensor, default_dtype, ops
from .primitive_checks import Case, CaseBuilder, run_case_checks

# a narrow statistics network keeps ReLU kinks away from the perturbations
MI_CHECK_HIDDEN = 8


def _batch(rng: np.random.Generator) -> tuple[int, int]:
    return int(rng.integers(3, 6)), int(rng.integers(2, 5))


def _labels(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    return rng.integers(1, k + 1, size=n)


def _softmax_ce(rng: np.random.Generator) -> Case:
    n, k = _batch(rng)
    labels = _labels(rng, n, k)
    return (lambda logits: class_nll(ops.softmax(logits), labels)), [rng.standard_normal((n, k))]


def _dual_ce(rng: np.random.Generator) -> Case:
    n, k = _batch(rng)
    labels = _labels(rng, n, k)

    def fn(a: Tensor, b: Tensor) -> Tensor:
        return ce_loss(ops.softmax(a), ops.softmax(b), labels)

    return fn, [rng.standard_normal((n, k)), rng.standard_normal((n, k))]


def _ne_entropy(rng: np.random.Generator) -> Case:
    n, k = _batch(rng)
    return (lambda logits: ne_loss(ops.softmax(logits))), [rng.standard_normal((n, k))]


def _ne_true_class(rng: np.random.Generator) -> Case:
    n, k = _batch(rng)
    labels = _labels(rng, n, k)
    return (lambda logits: ne_loss(ops.softmax(logits), labels, NeForm.TRUE_CLASS)), [
        rng.standard_normal((n, k))
    ]


def _recon(rng: np.random.Generator) -> Case:
    n, d = _batch(rng)
    return recon_loss, [rng.standard_normal((n, d)), rng.standard_normal((n, d))]


def _mine(rng: np.random.Generator) -> Case:
    n, d = _batch(rng)
    with default_dtype(np.float64):
        net = MiNetwork("mi_check", d, int(rng.integers(0, 2**31)), hidden=MI_CHECK_HIDDEN)
    perm = rng.permutation(n)

    def fn(z_sig: Tensor, z_red: Tensor) -> Tensor:
        return mine_loss(net, z_sig, z_red, perm)

    return fn, [rng.standard_normal((n, d)), rng.standard_normal((n, d))]


LOSS_CHECKS: dict[str, CaseBuilder] = {
    "softmax_cross_entropy": _softmax_ce,
    "ce_loss": _dual_ce,
    "ne_loss[entropy]": _ne_entropy,
    "ne_loss[true_class]": _ne_true_class,
    "recon_loss": _recon,
    "mine_loss": _mine,
}


def run_loss_checks(seeds: range = range(5), tolerance: float = 1e-3) -> list[GradCheckResult]:
    return run_case_checks(LOSS_CHECKS, seeds, tolerance)
