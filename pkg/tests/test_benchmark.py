"""Long end-to-end acceptance runs; select with ``pytest -m benchmark``."""

import json
import logging
import math
from pathlib import Path

import numpy as np
import pytest

from bpd_har.config import load_run_config
from bpd_har.data import generate_synthetic, plan_splits
from bpd_har.metrics import diagnostics
from bpd_har.metrics.protocol import build_model, run_protocol, run_protocol_detailed
from bpd_har.mine import estimate_mutual_information
from bpd_har.schemas.common import ModelKind, SplitKind
from bpd_har.trainer import fit

pytestmark = [pytest.mark.benchmark, pytest.mark.timeout(0)]

SYNTHETIC = Path(__file__).resolve().parent.parent / "configs" / "synthetic.ini"
# Avg. macro-F1 of the shipped synthetic run, written by the first benchmark run
REFERENCE = Path(__file__).resolve().parent / "synthetic_reference.json"
REFERENCE_TOLERANCE = 0.02

logger = logging.getLogger(__name__)


def _gaussian_pairs(rho: float, n: int = 10000, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    z = rho * x + math.sqrt(1.0 - rho**2) * rng.standard_normal(n)
    return x, z


class TestMineOracle:
    """The statistics network recovers the analytic Gaussian mutual information."""

    def test_correlated(self):
        x, z = _gaussian_pairs(0.8)
        expected = -0.5 * math.log(1.0 - 0.8**2)
        assert estimate_mutual_information(x, z) == pytest.approx(expected, abs=0.1)

    def test_independent(self):
        x, z = _gaussian_pairs(0.0, seed=1)
        assert estimate_mutual_information(x, z) == pytest.approx(0.0, abs=0.05)


class TestSyntheticRegression:
    """Shipped synthetic benchmark: disentanglement helps across subjects."""

    @pytest.fixture(scope="class")
    def config(self):
        return load_run_config(SYNTHETIC)

    @pytest.fixture(scope="class")
    def dataset(self, config):
        return generate_synthetic(config.synth)

    def test_first_epoch_cross_entropy(self, config, dataset):
        train_config = config.train.model_copy(update={"max_epoch": 1})
        nets = build_model(ModelKind.BPD, dataset, train_config)
        log = fit(nets, dataset, train_config).logs[0]
        assert log.ce == pytest.approx(2 * math.log(dataset.class_count), abs=0.15)

    def test_bpd_not_worse_than_baseline(self, config, dataset):
        plan = plan_splits(dataset, SplitKind.LOSO)
        results = {
            kind: run_protocol_detailed(dataset, plan, config.train, kind, threads=config.protocol.fold_threads)
            for kind in (ModelKind.BASELINE, ModelKind.BPD)
        }
        assert results[ModelKind.BPD].report.overall >= results[ModelKind.BASELINE].report.overall
        _check_reference({kind.value: result.report.overall for kind, result in results.items()})

        for fold in results[ModelKind.BPD].folds:
            summary = diagnostics(fold.logs, dataset.class_count)
            assert summary.mine_decreased
            assert summary.entropy_increased

    def test_nuisance_amplitude_raises_baseline_error(self, config):
        train_config = config.train.model_copy(update={"max_epoch": 20})
        errors = []
        for amplitude in (0.0, 1.5):
            dataset = generate_synthetic(config.synth.model_copy(update={"nuisance_amplitude": amplitude}))
            report = run_protocol(
                dataset, plan_splits(dataset, SplitKind.LOSO), train_config, ModelKind.BASELINE,
                threads=config.protocol.fold_threads,
            )
            errors.append(1.0 - report.overall)
        assert errors[1] > errors[0]


def _check_reference(observed: dict[str, float]) -> None:
    if not REFERENCE.exists():
        REFERENCE.write_text(json.dumps(observed, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.warning(f"Recorded synthetic reference {observed} to {REFERENCE}")
        return
    pinned = json.loads(REFERENCE.read_text(encoding="utf-8"))
    for model, value in observed.items():
        assert value == pytest.approx(pinned[model], abs=REFERENCE_TOLERANCE), model
