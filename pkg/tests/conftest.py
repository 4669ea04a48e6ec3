"""
Pytest configuration for bpd_har tests.

Fixtures build deliberately small networks (window 32, a handful of filters) so the
full four-phase update runs in milliseconds; full-size shapes are exercised only
where a test is about them.
"""

import logging
import sys

import numpy as np
import pytest

from bpd_har.config import TrainConfig
from bpd_har.data.dataset import SegmentDataset
from bpd_har.schemas.data import SynthSpec
from bpd_har.schemas.model import EncoderSpec

# Configure logging to stdout at INFO level
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.StreamHandler(sys.stdout)],
)

TINY_WINDOW = 32
TINY_CHANNELS = 3
TINY_LATENT = 8


@pytest.fixture
def tiny_spec() -> EncoderSpec:
    return EncoderSpec(
        input_channels=TINY_CHANNELS,
        window_length=TINY_WINDOW,
        latent_dim=TINY_LATENT,
        filters=4,
        kernel_size=3,
        lstm_hidden=8,
    )


@pytest.fixture
def tiny_config() -> TrainConfig:
    return TrainConfig(
        lr=1e-3,
        batch_size=8,
        max_epoch=1,
        seed=3,
        latent_dim=TINY_LATENT,
        encoder_filters=4,
        kernel_size=3,
        lstm_hidden=8,
    )


@pytest.fixture
def tiny_synth() -> SynthSpec:
    return SynthSpec(
        class_count=3,
        subject_count=3,
        channels=TINY_CHANNELS,
        window_length=TINY_WINDOW,
        segments_per_subject_per_class=4,
        seed=11,
    )


def random_dataset(
    n: int,
    class_count: int = 3,
    subjects: int = 2,
    channels: int = TINY_CHANNELS,
    window: int = TINY_WINDOW,
    seed: int = 0,
) -> SegmentDataset:
    """Gaussian segments with labels cycling through 1..K."""
    rng = np.random.default_rng(seed)
    return SegmentDataset(
        segments=rng.standard_normal((n, channels, window)),
        labels=np.arange(n) % class_count + 1,
        subjects=[f"s{i % subjects + 1}" for i in range(n)],
        class_count=class_count,
        label_names={k: f"class_{k}" for k in range(1, class_count + 1)},
    )
