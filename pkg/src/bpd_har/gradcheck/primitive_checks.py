"""Finite-difference checks for every differentiable primitive.

Each case builder draws shapes and values from the seed and keeps inputs inside
the region where the primitive is smooth: positive values for log and sqrt,
values away from the ReLU and clamp kinks, well-separated values for max-pool.
"""

from collections.abc import Callable

import numpy as np

from ..schemas.gradcheck import GradCheckResult
from ..tensor import Tensor, grad_check, ops

Case = tuple[Callable[..., Tensor], list[np.ndarray]]
CaseBuilder = Callable[[np.random.Generator], Case]


def _dims(rng: np.random.Generator) -> tuple[int, int]:
    return int(rng.integers(2, 5)), int(rng.integers(2, 5))


def _away_from_zero(rng: np.random.Generator, shape: tuple[int, ...], margin: float = 0.1) -> np.ndarray:
    values = rng.standard_normal(shape)
    return np.sign(values) * (np.abs(values) + margin)


def _add(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    return ops.add, [rng.standard_normal((n, d)), rng.standard_normal(d)]


def _sub(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    return ops.sub, [rng.standard_normal((n, d)), rng.standard_normal((n, d))]


def _mul(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    return ops.mul, [rng.standard_normal((n, d)), rng.standard_normal(d)]


def _square(rng: np.random.Generator) -> Case:
    return ops.square, [rng.standard_normal(_dims(rng))]


def _sqrt(rng: np.random.Generator) -> Case:
    return ops.sqrt, [np.abs(rng.standard_normal(_dims(rng))) + 0.5]


def _exp(rng: np.random.Generator) -> Case:
    return ops.exp, [0.5 * rng.standard_normal(_dims(rng))]


def _log(rng: np.random.Generator) -> Case:
    return ops.log, [np.abs(rng.standard_normal(_dims(rng))) + 0.5]


def _relu(rng: np.random.Generator) -> Case:
    return ops.relu, [_away_from_zero(rng, _dims(rng))]


def _tanh(rng: np.random.Generator) -> Case:
    return ops.tanh, [rng.standard_normal(_dims(rng))]


def _clamp_min(rng: np.random.Generator) -> Case:
    return (lambda x: ops.clamp_min(x, 0.0)), [_away_from_zero(rng, _dims(rng))]


def _softmax(rng: np.random.Generator) -> Case:
    return ops.softmax, [rng.standard_normal(_dims(rng))]


def _sum(rng: np.random.Generator) -> Case:
    return (lambda x: ops.sum(x, axis=1)), [rng.standard_normal(_dims(rng))]


def _mean(rng: np.random.Generator) -> Case:
    return (lambda x: ops.mean(x, axis=0)), [rng.standard_normal(_dims(rng))]


def _concat(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    return (lambda a, b: ops.concat([a, b], axis=-1)), [
        rng.standard_normal((n, d)),
        rng.standard_normal((n, d + 1)),
    ]


def _reshape(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    return (lambda x: ops.reshape(x, (n * d,))), [rng.standard_normal((n, d))]


def _take(rng: np.random.Generator) -> Case:
    n, c = _dims(rng)
    t = int(rng.integers(0, 3))
    return (lambda x: ops.take(x, t, axis=2)), [rng.standard_normal((n, c, 3))]


def _gather_rows(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    order = rng.integers(0, n, size=n)
    return (lambda x: ops.gather_rows(x, order)), [rng.standard_normal((n, d))]


def _pick(rng: np.random.Generator) -> Case:
    n, k = _dims(rng)
    index = rng.integers(0, k, size=n)
    return (lambda x: ops.pick(x, index)), [rng.standard_normal((n, k))]


def _matmul(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    m = int(rng.integers(2, 5))
    return ops.matmul, [rng.standard_normal((n, d)), rng.standard_normal((d, m))]


def _conv1d(rng: np.random.Generator) -> Case:
    n, c = _dims(rng)
    out, k = int(rng.integers(2, 4)), int(rng.integers(2, 4))
    return ops.conv1d, [
        rng.standard_normal((n, c, 7)),
        rng.standard_normal((out, c, k)),
        rng.standard_normal(out),
    ]


def _max_pool1d(rng: np.random.Generator) -> Case:
    n, c = _dims(rng)
    steps = 7
    values = rng.permutation(n * c * steps).reshape(n, c, steps) * 0.01
    return (lambda x: ops.max_pool1d(x, 2)), [values]


def _batch_norm_train(rng: np.random.Generator) -> Case:
    n, d = int(rng.integers(3, 6)), int(rng.integers(2, 5))

    def fn(x: Tensor, gamma: Tensor, beta: Tensor) -> Tensor:
        return ops.batch_norm(x, gamma, beta, np.zeros(d), np.ones(d), training=True)

    return fn, [rng.standard_normal((n, d)), rng.standard_normal(d), rng.standard_normal(d)]


def _batch_norm_eval(rng: np.random.Generator) -> Case:
    n, d = _dims(rng)
    running_mean = rng.standard_normal(d)
    running_var = np.abs(rng.standard_normal(d)) + 0.5

    def fn(x: Tensor, gamma: Tensor, beta: Tensor) -> Tensor:
        return ops.batch_norm(
            x, gamma, beta, running_mean.copy(), running_var.copy(), training=False
        )

    return fn, [rng.standard_normal((n, d)), rng.standard_normal(d), rng.standard_normal(d)]


def _dropout(rng: np.random.Generator) -> Case:
    mask_seed = int(rng.integers(0, 2**31))

    def fn(x: Tensor) -> Tensor:
        return ops.dropout(x, 0.3, np.random.default_rng(mask_seed), training=True)

    return fn, [rng.standard_normal(_dims(rng))]


def _lstm_cell(rng: np.random.Generator) -> Case:
    n, i = _dims(rng)
    hidden = int(rng.integers(2, 4))

    def fn(x: Tensor, h: Tensor, c: Tensor, w_x: Tensor, w_h: Tensor, bias: Tensor) -> Tensor:
        h_new, c_new = ops.lstm_cell(x, h, c, w_x, w_h, bias)
        return ops.add(h_new, ops.scale(c_new, 0.5))

    return fn, [
        rng.standard_normal((n, i)),
        rng.standard_normal((n, hidden)),
        rng.standard_normal((n, hidden)),
        0.5 * rng.standard_normal((i, 4 * hidden)),
        0.5 * rng.standard_normal((hidden, 4 * hidden)),
        0.5 * rng.standard_normal(4 * hidden),
    ]


PRIMITIVE_CHECKS: dict[str, CaseBuilder] = {
    "add": _add,
    "sub": _sub,
    "mul": _mul,
    "square": _square,
    "sqrt": _sqrt,
    "exp": _exp,
    "log": _log,
    "relu": _relu,
    "tanh": _tanh,
    "clamp_min": _clamp_min,
    "softmax": _softmax,
    "sum": _sum,
    "mean": _mean,
    "concat": _concat,
    "reshape": _reshape,
    "take": _take,
    "gather_rows": _gather_rows,
    "pick": _pick,
    "matmul": _matmul,
    "conv1d": _conv1d,
    "max_pool1d": _max_pool1d,
    "batch_norm_train": _batch_norm_train,
    "batch_norm_eval": _batch_norm_eval,
    "dropout": _dropout,
    "lstm_cell": _lstm_cell,
}


def run_case_checks(
    registry: dict[str, CaseBuilder], seeds: range, tolerance: float
) -> list[GradCheckResult]:
    results: list[GradCheckResult] = []
    for name, builder in registry.items():
        for seed in seeds:
            fn, inputs = builder(np.random.default_rng(seed))
            results.append(grad_check(fn, inputs, tolerance=tolerance, seed=seed, name=f"{name}[seed={seed}]"))
    return results


def run_primitive_checks(seeds: range = range(5), tolerance: float = 1e-3) -> list[GradCheckResult]:
    return run_case_checks(PRIMITIVE_CHECKS, seeds, tolerance)
