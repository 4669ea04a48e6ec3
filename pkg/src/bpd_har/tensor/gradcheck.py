"""Central finite-difference checking of analytic gradients."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np

from ..schemas.common import CheckStatus
from ..schemas.gradcheck import GradCheckResult
from . import ops
from .core import ComputationRecord, Tensor, default_dtype

logger = logging.getLogger(__name__)

CheckedFn = Callable[..., Tensor]


def _scalarize(out: Tensor, projection: np.ndarray | None) -> Tensor:
    if projection is None:
        return ops.sum(out)
    return ops.sum(ops.mul(out, Tensor(projection, dtype=out.dtype)))


def grad_check(
    fn: CheckedFn,
    inputs: Sequence[np.ndarray | tuple[int, ...]],
    tolerance: float = 1e-3,
    eps: float = 1e-4,
    seed: int = 0,
    name: str | None = None,
) -> GradCheckResult:
    """Compare analytic gradients of ``fn`` with central finite differences.

    ``inputs`` holds either concrete arrays or shapes to sample from a standard
    normal. Non-scalar outputs are reduced with a fixed random projection.
    Everything runs in 64-bit. Failures are reported in the result, never raised.
    """
    check_name = name or getattr(fn, "__name__", "op")
    rng = np.random.default_rng(seed)
    arrays = [
        np.array(item, dtype=np.float64)
        if isinstance(item, np.ndarray)
        else rng.standard_normal(item)
        for item in inputs
    ]
    labels = [f"input{i}" for i in range(len(arrays))]

    try:
        with default_dtype(np.float64):
            sample = fn(*[Tensor(a) for a in arrays])
            projection = None if sample.size == 1 else rng.standard_normal(sample.shape)

            params = [Tensor(a.copy(), requires_grad=True) for a in arrays]
            with ComputationRecord() as record:
                root = _scalarize(fn(*params), projection)
                record.backward(root)

            def evaluate(values: list[np.ndarray]) -> float:
                return _scalarize(fn(*[Tensor(v) for v in values]), projection).item()

            errors: dict[str, float] = {}
            for k, (label, param) in enumerate(zip(labels, params)):
                analytic = (
                    np.zeros_like(arrays[k]) if param.grad is None else param.grad.data
                )
                worst = 0.0
                for index in np.ndindex(arrays[k].shape):
                    shifted = [a.copy() for a in arrays]
                    shifted[k][index] += eps
                    upper = evaluate(shifted)
                    shifted[k][index] -= 2 * eps
                    lower = evaluate(shifted)
                    numeric = (upper - lower) / (2 * eps)
                    err = abs(analytic[index] - numeric) / max(1.0, abs(numeric))
                    worst = max(worst, float(err))
                errors[label] = worst
    except Exception as exc:  # reported, not raised
        logger.warning(f"grad check {check_name} raised {exc!r}")
        return GradCheckResult(
            check_name=check_name,
            status=CheckStatus.FAIL,
            tolerance=tolerance,
            detail=f"raised {type(exc).__name__}: {exc}",
        )

    failed = {label: err for label, err in errors.items() if not err < tolerance}
    status = CheckStatus.FAIL if failed else CheckStatus.PASS
    detail = (
        ", ".join(f"{label} max rel err {err:.2e}" for label, err in failed.items())
        if failed
        else ""
    )
    return GradCheckResult(
        check_name=check_name,
        status=status,
        tolerance=tolerance,
        max_relative_error=errors,
        detail=detail,
    )
