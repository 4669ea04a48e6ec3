"""Finite-difference checks of every primitive and objective, and of the checker itself."""

import numpy as np
import pytest

from bpd_har.gradcheck import (
    LOSS_CHECKS,
    PRIMITIVE_CHECKS,
    render_gradchecks,
    run_all_gradchecks,
    run_loss_checks,
    run_primitive_checks,
)
from bpd_har.gradcheck.primitive_checks import run_case_checks
from bpd_har.losses import class_nll
from bpd_har.schemas.common import CheckStatus
from bpd_har.tensor import Tensor, grad_check, ops
from bpd_har.tensor.core import emit


def _bad_square(x: Tensor) -> Tensor:
    """Square with a vector-Jacobian product that is off by a factor 1.5."""

    def vjp(gs):
        return (gs[0] * 3.0 * x.data,)

    return emit("bad_square", (x,), (x.data * x.data,), vjp)[0]


def _bad_square_case(rng: np.random.Generator):
    return _bad_square, [rng.standard_normal((2, 3))]


# ============================================================================
# CHECKER
# ============================================================================


class TestGradCheck:
    """The checker passes correct gradients and catches wrong ones."""

    def test_matmul_passes(self):
        result = grad_check(ops.matmul, [(3, 4), (4, 2)], tolerance=1e-3, name="matmul")
        assert result.status == CheckStatus.PASS
        assert set(result.max_relative_error) == {"input0", "input1"}
        assert result.worst < 1e-3

    def test_softmax_cross_entropy_composite_passes(self):
        labels = np.array([1, 4, 2, 3, 4])
        result = grad_check(lambda logits: class_nll(ops.softmax(logits), labels), [(5, 4)])
        assert result.status == CheckStatus.PASS

    def test_corrupted_gradient_fails(self):
        result = grad_check(_bad_square, [(3, 2)], name="bad_square")
        assert result.status == CheckStatus.FAIL
        assert "input0" in result.detail

    def test_raising_function_is_reported_not_raised(self):
        result = grad_check(lambda x: ops.log(ops.sub(x, 100.0)), [(2, 2)], name="bad_domain")
        assert result.status == CheckStatus.FAIL
        assert "NumericDomainError" in result.detail

    def test_explicit_arrays_are_used(self):
        result = grad_check(ops.sqrt, [np.array([[1.0, 4.0]])])
        assert result.status == CheckStatus.PASS


# ============================================================================
# SUITE
# ============================================================================


class TestSuite:
    """Every registered case passes on several seeds."""

    def test_primitive_registry_covers_the_required_set(self):
        required = {
            "matmul", "conv1d", "add", "sub", "mul", "relu", "softmax", "log", "exp",
            "mean", "sum", "concat", "batch_norm_train", "dropout", "square", "sqrt", "lstm_cell",
        }
        assert required <= set(PRIMITIVE_CHECKS)

    def test_all_primitives_pass(self):
        results = run_primitive_checks(range(3))
        failed = [r.check_name + " " + r.detail for r in results if r.status is CheckStatus.FAIL]
        assert failed == []
        assert len(results) == 3 * len(PRIMITIVE_CHECKS)

    def test_all_losses_pass(self):
        results = run_loss_checks(range(3))
        failed = [r.check_name + " " + r.detail for r in results if r.status is CheckStatus.FAIL]
        assert failed == []
        assert {r.check_name.split("[seed")[0] for r in results} == set(LOSS_CHECKS)

    def test_failures_sorted_first(self, monkeypatch):
        monkeypatch.setitem(PRIMITIVE_CHECKS, "bad_square", _bad_square_case)
        results = run_all_gradchecks(seeds=1)
        assert results[0].check_name == "bad_square[seed=0]"
        assert results[0].status is CheckStatus.FAIL
        assert all(r.status is CheckStatus.PASS for r in results[1:])

    def test_render_lists_errors_and_totals(self):
        results = run_all_gradchecks(seeds=1)
        text = render_gradchecks(results)
        assert "matmul[seed=0]" in text
        assert "max rel err" in text
        assert text.rstrip().endswith(f"{len(results)} passed, 0 failed")

    @pytest.mark.parametrize("name", ["conv1d", "lstm_cell", "batch_norm_train", "max_pool1d"])
    def test_structured_primitives_on_more_seeds(self, name):
        results = run_case_checks({name: PRIMITIVE_CHECKS[name]}, range(5, 10), 1e-3)
        assert [r.status for r in results] == [CheckStatus.PASS] * 5
