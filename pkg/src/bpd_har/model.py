"""BPD network assembly, forward paths, inference and feature export."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from .data.dataset import SegmentDataset
from .errors import ShapeMismatchError
from .nn import Classifier, Component, Disentangler, Encoder, MiNetwork, Reconstructor, build_encoder
from .schemas.common import FeatureField
from .schemas.model import EncoderSpec
from .seeding import combined_seed
from .tensor import Tensor, ops

logger = logging.getLogger(__name__)

INFER_CHUNK = 256
FEATURE_ORDER = (FeatureField.Z_SIG, FeatureField.Z_RED, FeatureField.ENC)

Mode = Literal["train", "eval"]


@dataclass
class BpdNetworks:
    """The seven BPD components. ``d_red``/``c_red`` are the adversarial branch."""

    encoder: Encoder
    d_sig: Disentangler
    d_red: Disentangler
    c_sig: Classifier
    c_red: Classifier
    reconstructor: Reconstructor
    mi_net: MiNetwork
    class_count: int
    spec: EncoderSpec

    @property
    def latent_dim(self) -> int:
        return self.spec.latent

    def groups(self) -> dict[str, Component]:
        """Component groups in a fixed order; each gets its own optimizer."""
        return {
            "encoder": self.encoder,
            "d_sig": self.d_sig,
            "d_red": self.d_red,
            "c_sig": self.c_sig,
            "c_red": self.c_red,
            "reconstructor": self.reconstructor,
            "mi_net": self.mi_net,
        }

    def set_mode(self, mode: Mode) -> None:
        for component in self.groups().values():
            component.train(mode == "train")

    def activity_probs(self, x: Tensor) -> Tensor:
        return self.c_sig(self.d_sig(self.encoder(x)))


@dataclass
class BaselineNetworks:
    """Encoder followed directly by one classifier."""

    encoder: Encoder
    classifier: Classifier
    class_count: int
    spec: EncoderSpec

    @property
    def latent_dim(self) -> int:
        return self.spec.latent

    def groups(self) -> dict[str, Component]:
        return {"encoder": self.encoder, "classifier": self.classifier}

    def set_mode(self, mode: Mode) -> None:
        for component in self.groups().values():
            component.train(mode == "train")

    def activity_probs(self, x: Tensor) -> Tensor:
        return self.classifier(self.encoder(x))


Networks = BpdNetworks | BaselineNetworks


@dataclass
class ForwardBundle:
    enc: Tensor
    z_sig: Tensor
    z_red: Tensor
    p_sig: Tensor
    p_red: Tensor
    recon: Tensor


def _check_class_count(class_count: int) -> None:
    if class_count < 2:
        raise ShapeMismatchError("build_networks", f"class_count must be at least 2, got {class_count}")


def build_networks(
    spec: EncoderSpec,
    class_count: int,
    seed: int,
    dropout_rate: float = 0.5,
) -> BpdNetworks:
    """Fresh BPD components, each seeded from (seed, component name)."""
    _check_class_count(class_count)
    latent = spec.latent
    nets = BpdNetworks(
        encoder=build_encoder(spec, combined_seed(seed, "encoder")),
        d_sig=Disentangler("d_sig", latent, combined_seed(seed, "d_sig")),
        d_red=Disentangler("d_red", latent, combined_seed(seed, "d_red")),
        c_sig=Classifier("c_sig", latent, class_count, combined_seed(seed, "c_sig"), dropout_rate),
        c_red=Classifier("c_red", latent, class_count, combined_seed(seed, "c_red"), dropout_rate),
        reconstructor=Reconstructor("reconstructor", latent, combined_seed(seed, "reconstructor")),
        mi_net=MiNetwork("mi_net", latent, combined_seed(seed, "mi_net")),
        class_count=class_count,
        spec=spec,
    )
    logger.info(
        f"Built BPD networks: encoder={spec.kind.value} latent={latent} K={class_count} "
        f"params={sum(parameter_counts(nets).values())}"
    )
    return nets


def build_baseline(
    spec: EncoderSpec,
    class_count: int,
    seed: int,
    dropout_rate: float = 0.5,
) -> BaselineNetworks:
    _check_class_count(class_count)
    return BaselineNetworks(
        encoder=build_encoder(spec, combined_seed(seed, "encoder")),
        classifier=Classifier(
            "classifier", spec.latent, class_count, combined_seed(seed, "classifier"), dropout_rate
        ),
        class_count=class_count,
        spec=spec,
    )


def parameter_counts(nets: Networks) -> dict[str, int]:
    return {name: component.parameter_count() for name, component in nets.groups().items()}


def full_forward(nets: BpdNetworks, batch: Tensor, mode: Mode = "eval") -> ForwardBundle:
    """Every BPD output for one batch in a single pass."""
    nets.set_mode(mode)
    enc = nets.encoder(batch)
    z_sig = nets.d_sig(enc)
    z_red = nets.d_red(enc)
    return ForwardBundle(
        enc=enc,
        z_sig=z_sig,
        z_red=z_red,
        p_sig=nets.c_sig(z_sig),
        p_red=nets.c_red(z_red),
        recon=nets.reconstructor(ops.concat([z_sig, z_red], axis=-1)),
    )


def predict_labels(probs: np.ndarray) -> np.ndarray:
    """1-based argmax per row; ties go to the lowest class index."""
    return np.argmax(np.asarray(probs), axis=1).astype(np.int64) + 1


def _chunks(segments: np.ndarray, chunk: int) -> Iterator[Tensor]:
    for start in range(0, len(segments), chunk):
        yield Tensor(segments[start : start + chunk])


def infer(nets: Networks, segments: np.ndarray | Tensor, chunk: int = INFER_CHUNK) -> np.ndarray:
    """Predicted labels in [1, K] from the activity path only, in eval mode."""
    data = segments.data if isinstance(segments, Tensor) else np.asarray(segments)
    if len(data) == 0:
        return np.zeros(0, dtype=np.int64)
    nets.set_mode("eval")
    labels = [predict_labels(nets.activity_probs(x).data) for x in _chunks(data, chunk)]
    return np.concatenate(labels)


def _features(nets: BpdNetworks, x: Tensor, fields: Sequence[FeatureField]) -> list[np.ndarray]:
    enc = nets.encoder(x)
    values = {FeatureField.ENC: enc}
    if FeatureField.Z_SIG in fields:
        values[FeatureField.Z_SIG] = nets.d_sig(enc)
    if FeatureField.Z_RED in fields:
        values[FeatureField.Z_RED] = nets.d_red(enc)
    return [values[f].data for f in FEATURE_ORDER if f in fields]


def feature_table(
    nets: BpdNetworks,
    dataset: SegmentDataset,
    fields: Sequence[FeatureField] = (FeatureField.Z_SIG,),
    chunk: int = INFER_CHUNK,
) -> pd.DataFrame:
    """One row per segment: id, subject, label, then the selected features.

    Feature columns are numbered f0.. in the order z_sig, z_red, enc.
    """
    if not fields:
        raise ValueError("at least one feature field must be selected")
    nets.set_mode("eval")
    blocks: list[np.ndarray] = []
    for x in _chunks(dataset.segments, chunk):
        blocks.append(np.concatenate(_features(nets, x, fields), axis=1))
    width = sum(nets.latent_dim for _ in set(fields))
    values = np.concatenate(blocks) if blocks else np.zeros((0, width), dtype=np.float32)

    table = pd.DataFrame(values, columns=[f"f{i}" for i in range(values.shape[1])])
    table.insert(0, "label", dataset.labels)
    table.insert(0, "subject", dataset.subjects)
    table.insert(0, "segment_id", dataset.ids)
    return table


def export_features(
    nets: BpdNetworks,
    dataset: SegmentDataset,
    path: Path | str,
    fields: Sequence[FeatureField] = (FeatureField.Z_SIG,),
) -> pd.DataFrame:
    """Write the feature table as comma-separated text (6 significant digits)."""
    table = feature_table(nets, dataset, fields)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(target, index=False, float_format="%.6g")
    logger.info(f"Exported {len(table)} feature rows ({table.shape[1] - 3} values each) to {target}")
    return table
