"""
Run configuration.

Run configs are INI files with the sections [train], [data], [synth] and
[protocol]. Each section validates into a pydantic model; absent keys take the
defaults below and the resolved config is echoed into the run directory.
"""

import configparser
import difflib
import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .runtime import default_thread_count
from .schemas.common import EncoderKind, F1Average, MineMode, ModelKind, NeForm, SplitKind
from .schemas.data import SynthSpec
from .schemas.model import EncoderSpec

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 168
DEFAULT_OVERLAP = 0.5


class TrainConfig(BaseModel):
    """Hyperparameters and mode switches of the four-phase training loop."""

    model_config = ConfigDict(extra="forbid")

    lr: float = Field(default=1e-4, gt=0, title="learning rate")
    batch_size: int = Field(default=64, ge=2)
    max_epoch: int = Field(default=300, ge=1, title="max epochs")
    seed: int = 0
    encoder: EncoderKind = EncoderKind.CNN
    latent_dim: int | None = Field(default=None, gt=0)
    encoder_filters: int = Field(default=64, gt=0)
    kernel_size: int = Field(default=5, gt=0)
    lstm_hidden: int = Field(default=128, gt=0)
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)
    mine_mode: MineMode = MineMode.LITERAL
    ne_form: NeForm = NeForm.ENTROPY
    convergence_patience: int = Field(default=20, ge=1)
    convergence_delta: float = Field(default=1e-4, ge=0.0)
    dependency_reduction: bool = True
    reconstruction: bool = True

    def encoder_spec(self, channels: int, window_length: int) -> EncoderSpec:
        return EncoderSpec(
            kind=self.encoder,
            input_channels=channels,
            window_length=window_length,
            latent_dim=self.latent_dim,
            filters=self.encoder_filters,
            kernel_size=self.kernel_size,
            lstm_hidden=self.lstm_hidden,
        )

    def for_model(self, kind: ModelKind) -> "TrainConfig":
        """Copy with the ablation switches implied by a model kind."""
        if kind is ModelKind.BPD_NO_DEPENDENCY:
            return self.model_copy(update={"dependency_reduction": False})
        if kind is ModelKind.BPD_NO_RECON:
            return self.model_copy(update={"reconstruction": False})
        return self


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class DataSettings(BaseModel):
    """Where segments come from and how streams are windowed."""

    model_config = ConfigDict(extra="forbid")

    source: Literal["manifest", "synthetic"] = "manifest"
    manifest: Path | None = None
    window_length: int | None = Field(default=None, gt=0)
    overlap: float | None = Field(default=None, ge=0.0, lt=1.0)
    normalize: bool = True

    @model_validator(mode="after")
    def _check_source(self) -> "DataSettings":
        if self.source == "manifest" and self.manifest is None:
            raise ValueError("manifest is required unless source = synthetic")
        return self


class ProtocolSettings(BaseModel):
    """Evaluation protocol and fold scheduling."""

    model_config = ConfigDict(extra="forbid")

    kind: SplitKind = SplitKind.LOSO
    test_subjects: list[str] = []
    validation_subjects: list[str] = []
    model: ModelKind = ModelKind.BPD
    f1_average: F1Average = F1Average.MACRO
    threads: int | None = Field(default=None, ge=1)

    @field_validator("test_subjects", "validation_subjects", mode="before")
    @classmethod
    def _split_subjects(cls, value: Any) -> Any:
        return _split_list(value)

    @property
    def fold_threads(self) -> int:
        return self.threads if self.threads is not None else default_thread_count()


class RunConfig(BaseModel):
    """Root configuration of one experiment."""

    model_config = ConfigDict(extra="forbid")

    train: TrainConfig = TrainConfig()
    data: DataSettings = DataSettings(source="synthetic")
    synth: SynthSpec = SynthSpec()
    protocol: ProtocolSettings = ProtocolSettings()

    def with_seed(self, seed: int | None) -> "RunConfig":
        if seed is None:
            return self
        return self.model_copy(update={"train": self.train.model_copy(update={"seed": seed})})

    def with_model(self, model: ModelKind | None) -> "RunConfig":
        if model is None:
            return self
        return self.model_copy(
            update={"protocol": self.protocol.model_copy(update={"model": model})}
        )


SECTIONS: dict[str, type[BaseModel]] = {
    "train": TrainConfig,
    "data": DataSettings,
    "synth": SynthSpec,
    "protocol": ProtocolSettings,
}


def _squash(text: str) -> str:
    return text.lower().replace(" ", "").replace("_", "")


def nearest_key(key: str, model: type[BaseModel]) -> str:
    """Closest valid key, matching against field names and their titles."""
    best, best_score = "", -1.0
    for name, info in model.model_fields.items():
        for candidate in filter(None, (name, info.title)):
            score = difflib.SequenceMatcher(None, _squash(key), _squash(candidate)).ratio()
            if score > best_score:
                best, best_score = name, score
    return best


def _check_keys(section: str, keys: list[str], model: type[BaseModel]) -> None:
    for key in keys:
        if key not in model.model_fields:
            raise ConfigError(
                f"unknown key '{key}' in [{section}]; did you mean '{nearest_key(key, model)}'?"
            )


def parse_run_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Validate INI text into a RunConfig; a relative manifest resolves against base_dir."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    payload: dict[str, Any] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            match = difflib.get_close_matches(section, list(SECTIONS), n=1, cutoff=0.0)
            raise ConfigError(f"unknown section [{section}]; did you mean [{match[0]}]?")
        values = dict(parser.items(section))
        _check_keys(section, list(values), SECTIONS[section])
        payload[section] = values

    data = payload.get("data")
    if data is None:
        payload["data"] = {"source": "synthetic"}
    elif data.get("manifest") and base_dir is not None:
        manifest = Path(data["manifest"])
        if not manifest.is_absolute():
            data["manifest"] = str(base_dir / manifest)

    try:
        return RunConfig.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"invalid config value at {where}: {first['msg']}") from exc


def load_run_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = parse_run_config(text, base_dir=path.parent)
    logger.info(f"Loaded run config from {path}")
    return config


def _ini_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(str(v) for v in value)
    return str(value)


def render_run_config(config: RunConfig) -> str:
    """INI text of a resolved config; None-valued keys are omitted."""
    lines: list[str] = []
    dumped = config.model_dump(mode="json")
    for section in SECTIONS:
        lines.append(f"[{section}]")
        for key, value in dumped[section].items():
            if value is None:
                continue
            lines.append(f"{key} = {_ini_value(value)}")
        lines.append("")
    return "\n".join(lines)


def write_run_config(config: RunConfig, path: Path | str) -> Path:
    target = Path(path)
    target.write_text(render_run_config(config), encoding="utf-8")
    return target
