"""Checkpoint archives: parameters, buffers, optimizer moments and the run config.

Stored as a numpy ``.npz`` archive (format version 1) loaded with
``allow_pickle=False``; a save/load round trip is bit-exact.
"""

from __future__ import annotations

import json
import logging
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import TrainConfig
from ..data.segmentation import ChannelStats
from ..data.dataset import SegmentDataset
from ..errors import CheckpointError, ConfigMismatchError
from ..model import Networks, build_baseline, build_networks
from ..schemas.common import ModelKind
from ..schemas.model import EncoderSpec
from .optim import Adam, OptimizerState

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    nets: Networks
    optimizers: dict[str, Adam]
    config: TrainConfig
    model: ModelKind
    channel_stats: ChannelStats | None
    label_names: dict[int, str]

    @property
    def spec(self) -> EncoderSpec:
        return self.nets.spec

    def check_dataset(self, dataset: SegmentDataset) -> None:
        """Raise ConfigMismatchError naming every field the dataset disagrees on."""
        expected = [
            ("channels", self.spec.input_channels, dataset.channels),
            ("window_length", self.spec.window_length, dataset.window_length),
            ("class_count", self.nets.class_count, dataset.class_count),
        ]
        diffs = [(name, want, got) for name, want, got in expected if want != got]
        if diffs:
            raise ConfigMismatchError(diffs)


def _text(value: str) -> np.ndarray:
    return np.array(value)


def save_checkpoint(
    path: Path | str,
    nets: Networks,
    optimizers: dict[str, Adam],
    config: TrainConfig,
    model: ModelKind = ModelKind.BPD,
    channel_stats: ChannelStats | None = None,
    label_names: dict[int, str] | None = None,
) -> Path:
    arrays: dict[str, np.ndarray] = {
        "meta/format_version": np.array(FORMAT_VERSION),
        "meta/config": _text(config.model_dump_json()),
        "meta/spec": _text(nets.spec.model_dump_json()),
        "meta/model": _text(model.value),
        "meta/class_count": np.array(nets.class_count),
        "meta/label_names": _text(json.dumps({str(k): v for k, v in (label_names or {}).items()})),
    }
    for group, component in nets.groups().items():
        for name, tensor in component.parameters().items():
            arrays[f"param/{group}/{name}"] = tensor.data
        for name, values in component.buffers().items():
            arrays[f"buffer/{group}/{name}"] = values
        state = optimizers[group].state
        arrays[f"adam/{group}/step"] = np.array(state.step)
        for name in state.m:
            arrays[f"adam/{group}/m/{name}"] = state.m[name]
            arrays[f"adam/{group}/v/{name}"] = state.v[name]
    if channel_stats is not None:
        arrays["stats/mean"] = channel_stats.mean
        arrays["stats/std"] = channel_stats.std

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("wb") as handle:
        np.savez(handle, **arrays)
    logger.info(f"Saved checkpoint ({len(arrays)} arrays) to {target}")
    return target


def load_checkpoint(path: Path | str) -> Checkpoint:
    source = Path(path)
    try:
        archive = np.load(source, allow_pickle=False)
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"{source}: not a readable checkpoint ({exc})") from exc

    with archive:
        entries = {key: archive[key] for key in archive.files}

    def need(key: str) -> np.ndarray:
        if key not in entries:
            raise CheckpointError(f"{source}: missing entry '{key}'")
        return entries[key]

    version = int(need("meta/format_version"))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{source}: unsupported format version {version}")

    config = TrainConfig.model_validate_json(str(need("meta/config")))
    spec = EncoderSpec.model_validate_json(str(need("meta/spec")))
    model = ModelKind(str(need("meta/model")))
    class_count = int(need("meta/class_count"))
    label_names = {int(k): v for k, v in json.loads(str(need("meta/label_names"))).items()}

    if model is ModelKind.BASELINE:
        nets: Networks = build_baseline(spec, class_count, config.seed, config.dropout_rate)
    else:
        nets = build_networks(spec, class_count, config.seed, config.dropout_rate)

    optimizers: dict[str, Adam] = {}
    for group, component in nets.groups().items():
        for name, tensor in component.parameters().items():
            stored = need(f"param/{group}/{name}")
            if stored.shape != tensor.shape:
                raise CheckpointError(f"{source}: '{group}/{name}' has shape {stored.shape}, expected {tensor.shape}")
            tensor.data = stored.copy()
        for name, values in component.buffers().items():
            values[...] = need(f"buffer/{group}/{name}")
        opt = Adam(component, config.lr)
        state = OptimizerState(step=int(need(f"adam/{group}/step")))
        prefix = f"adam/{group}/m/"
        for key in entries:
            if key.startswith(prefix):
                name = key[len(prefix) :]
                state.m[name] = entries[key].copy()
                state.v[name] = need(f"adam/{group}/v/{name}").copy()
        opt.state = state
        optimizers[group] = opt

    stats = None
    if "stats/mean" in entries:
        stats = ChannelStats(mean=entries["stats/mean"].copy(), std=need("stats/std").copy())
    logger.info(f"Loaded {model.value} checkpoint from {source}")
    return Checkpoint(
        nets=nets,
        optimizers=optimizers,
        config=config,
        model=model,
        channel_stats=stats,
        label_names=label_names,
    )
