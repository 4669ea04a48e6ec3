"""Unit tests for the four training objectives."""

import math

import numpy as np
import pytest

from bpd_har.errors import ShapeMismatchError
from bpd_har.losses import ce_loss, class_nll, log_mean_exp, mine_loss, ne_loss, recon_loss
from bpd_har.nn import MiNetwork
from bpd_har.schemas.common import NeForm
from bpd_har.tensor import ComputationRecord, Tensor, default_dtype, ops


def _probs(rows) -> Tensor:
    return Tensor(np.asarray(rows, dtype=np.float64), dtype=np.float64)


def _uniform(n: int, k: int) -> Tensor:
    return _probs(np.full((n, k), 1.0 / k))


# ============================================================================
# DUAL CROSS-ENTROPY
# ============================================================================


class TestCeLoss:
    """Both branches supervised with the activity labels."""

    def test_perfect_predictions(self):
        p = _probs(np.eye(3))
        assert ce_loss(p, p, [1, 2, 3]).item() == pytest.approx(0.0, abs=1e-12)

    def test_uniform_k12(self):
        p = _uniform(5, 12)
        assert ce_loss(p, p, [1, 5, 7, 12, 3]).item() == pytest.approx(2 * math.log(12), abs=1e-9)

    def test_hand_evaluated(self):
        p_sig = _probs([[0.9, 0.1], [0.2, 0.8]])
        expected = -(math.log(0.9) + math.log(0.8)) / 2 + math.log(2)
        assert ce_loss(p_sig, _uniform(2, 2), [1, 2]).item() == pytest.approx(expected, abs=1e-12)

    def test_zero_probability_is_floored(self):
        value = class_nll(_probs([[1.0, 0.0]]), [2]).item()
        assert value == pytest.approx(-math.log(1e-12))

    def test_branch_shapes_must_agree(self):
        with pytest.raises(ShapeMismatchError):
            ce_loss(_uniform(2, 3), _uniform(2, 4), [1, 2])

    def test_labels_out_of_range(self):
        with pytest.raises(ShapeMismatchError):
            class_nll(_uniform(2, 3), [0, 4])


# ============================================================================
# NEGATIVE ENTROPY
# ============================================================================


class TestNeLoss:
    """Mean negative Shannon entropy of the adversarial classifier."""

    def test_uniform_k12(self):
        assert ne_loss(_uniform(4, 12)).item() == pytest.approx(-math.log(12), abs=1e-9)

    def test_one_hot(self):
        assert ne_loss(_probs(np.eye(4))).item() == pytest.approx(0.0, abs=1e-12)

    def test_more_uncertain_is_smaller(self):
        assert ne_loss(_probs([[0.5, 0.5]])).item() < ne_loss(_probs([[0.9, 0.1]])).item()

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_descent_converges_to_uniform(self, seed):
        theta = np.random.default_rng(seed).normal(0.0, 1.5, size=(3, 4))
        for _ in range(400):
            logits = Tensor(theta, requires_grad=True, dtype=np.float64)
            with ComputationRecord() as record:
                record.backward(ne_loss(ops.softmax(logits)))
            theta = theta - 6.0 * logits.grad.data
        probs = ops.softmax(Tensor(theta, dtype=np.float64))
        assert np.allclose(probs.data, 0.25, atol=1e-6)
        assert ne_loss(probs).item() == pytest.approx(-math.log(4), abs=1e-10)

    def test_any_non_uniform_row_is_larger(self):
        rows = np.random.default_rng(4).dirichlet(np.ones(4), size=50)
        values = [ne_loss(_probs(row[None, :])).item() for row in rows]
        assert min(values) > -math.log(4)

    def test_bounds(self):
        rng = np.random.default_rng(0)
        p = rng.dirichlet(np.ones(6), size=20)
        value = ne_loss(_probs(p)).item()
        assert -math.log(6) - 1e-9 <= value <= 0.0

    def test_true_class_form(self):
        p = _probs([[0.25, 0.75]])
        value = ne_loss(p, [2], NeForm.TRUE_CLASS).item()
        assert value == pytest.approx(-math.log(0.75))

    def test_true_class_needs_labels(self):
        with pytest.raises(ValueError):
            ne_loss(_uniform(2, 2), form=NeForm.TRUE_CLASS)


# ============================================================================
# RECONSTRUCTION
# ============================================================================


class TestReconLoss:
    """Mean L2 distance between E(x) and its reconstruction."""

    def test_identity(self):
        enc = _probs(np.random.default_rng(0).standard_normal((3, 4)))
        assert recon_loss(enc, enc).item() == 0.0

    def test_three_four_five(self):
        assert recon_loss(_probs([[3.0, 4.0]]), _probs([[0.0, 0.0]])).item() == pytest.approx(5.0)

    def test_brute_force(self):
        rng = np.random.default_rng(3)
        a, b = rng.standard_normal((7, 5)), rng.standard_normal((7, 5))
        expected = np.mean([math.sqrt(sum((a[i, j] - b[i, j]) ** 2 for j in range(5))) for i in range(7)])
        assert recon_loss(_probs(a), _probs(b)).item() == pytest.approx(expected, abs=1e-6)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            recon_loss(_probs(np.zeros((2, 3))), _probs(np.zeros((2, 4))))


# ============================================================================
# MINE BOUND
# ============================================================================


class TestMineLoss:
    """Donsker-Varadhan bound on a statistics network."""

    @pytest.fixture
    def net(self):
        with default_dtype(np.float64):
            return MiNetwork("mi", latent_dim=2, seed=5, hidden=6)

    def test_constant_statistic_gives_zero(self, net):
        net.fc2.weight.data[...] = 0.0
        net.fc2.bias.data[...] = 1.7
        rng = np.random.default_rng(0)
        z_sig, z_red = _probs(rng.standard_normal((5, 2))), _probs(rng.standard_normal((5, 2)))
        assert mine_loss(net, z_sig, z_red, rng.permutation(5)).item() == pytest.approx(0.0, abs=1e-12)

    def test_hand_evaluated_three_pairs(self, net):
        rng = np.random.default_rng(1)
        z_sig, z_red = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
        perm = np.array([2, 0, 1])

        def score(a, b):
            w1, b1 = net.fc1.weight.data, net.fc1.bias.data
            w2, b2 = net.fc2.weight.data, net.fc2.bias.data
            hidden = np.maximum(np.concatenate([a, b], axis=1) @ w1 + b1, 0.0)
            return (net.bound * np.tanh((hidden @ w2 + b2) / net.bound)).ravel()

        joint = score(z_sig, z_red)
        marginal = score(z_sig, z_red[perm])
        expected = joint.mean() - math.log(np.mean(np.exp(marginal)))
        value = mine_loss(net, _probs(z_sig), _probs(z_red), perm).item()
        assert value == pytest.approx(expected, abs=1e-10)

    def test_consistent_reordering_keeps_value(self, net):
        rng = np.random.default_rng(2)
        z_sig, z_red = rng.standard_normal((9, 2)), rng.standard_normal((9, 2))
        perm = rng.permutation(9)
        order = rng.permutation(9)
        # same marginal pairs after moving the joint rows
        moved_perm = np.argsort(order)[perm[order]]
        value = mine_loss(net, _probs(z_sig), _probs(z_red), perm).item()
        moved = mine_loss(net, _probs(z_sig[order]), _probs(z_red[order]), moved_perm).item()
        assert moved == pytest.approx(value, abs=1e-12)

    def test_needs_two_pairs(self, net):
        with pytest.raises(ShapeMismatchError):
            mine_loss(net, _probs([[0.0, 1.0]]), _probs([[1.0, 0.0]]), [0])

    def test_permutation_length(self, net):
        with pytest.raises(ShapeMismatchError):
            mine_loss(net, _uniform(3, 2), _uniform(3, 2), [0, 1])

    def test_log_mean_exp_is_stable(self):
        value = log_mean_exp(_probs([1000.0, 1000.0])).item()
        assert value == pytest.approx(1000.0)
