"""Layers, encoders and heads."""

from .encoders import CnnEncoder, ConvLstmEncoder, Encoder, build_encoder, encoder_forward
from .heads import (
    Classifier,
    Disentangler,
    Head,
    MiNetwork,
    Reconstructor,
    build_head,
    head_forward,
)
from .init import LayerParams, init_params, xavier_std
from .layers import BatchNorm1d, Component, Conv1d, Dropout, Linear, Lstm

__all__ = [
    "BatchNorm1d",
    "Classifier",
    "CnnEncoder",
    "Component",
    "Conv1d",
    "ConvLstmEncoder",
    "Disentangler",
    "Dropout",
    "Encoder",
    "Head",
    "LayerParams",
    "Linear",
    "Lstm",
    "MiNetwork",
    "Reconstructor",
    "build_encoder",
    "build_head",
    "encoder_forward",
    "head_forward",
    "init_params",
    "xavier_std",
]
