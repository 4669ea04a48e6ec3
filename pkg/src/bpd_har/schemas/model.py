"""Architecture descriptions."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .common import EncoderKind

DEFAULT_LATENT_DIM: dict[EncoderKind, int] = {
    EncoderKind.CNN: 592,
    EncoderKind.CONVLSTM: 32,
}


class EncoderSpec(BaseModel):
    """Shape contract of an encoder; latent_dim defaults by kind (592 cnn, 32 convlstm)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: EncoderKind = EncoderKind.CNN
    input_channels: int = Field(gt=0)
    window_length: int = Field(default=168, gt=0)
    latent_dim: int | None = Field(default=None, gt=0)
    filters: int = Field(default=64, gt=0)
    kernel_size: int = Field(default=5, gt=0)
    lstm_hidden: int = Field(default=128, gt=0)

    @model_validator(mode="before")
    @classmethod
    def _default_latent(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("latent_dim") is None:
            kind = EncoderKind(data.get("kind", EncoderKind.CNN))
            data = {**data, "latent_dim": DEFAULT_LATENT_DIM[kind]}
        return data

    @property
    def latent(self) -> int:
        assert self.latent_dim is not None
        return self.latent_dim
