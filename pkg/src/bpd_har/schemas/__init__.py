"""Pydantic records for configuration, datasets, reports and checks."""

from .common import (
    CheckStatus,
    EncoderKind,
    F1Average,
    FeatureField,
    HeadKind,
    MineMode,
    ModelKind,
    NeForm,
    SplitKind,
)
from .data import DatasetManifest, DatasetPreset, Fold, SplitPlan, SynthSpec
from .gradcheck import GradCheckResult
from .model import DEFAULT_LATENT_DIM, EncoderSpec
from .report import DiagnosticSummary, EpochLog, MetricsReport, SubjectScore

__all__ = [
    # Common
    "CheckStatus",
    "EncoderKind",
    "F1Average",
    "FeatureField",
    "HeadKind",
    "MineMode",
    "ModelKind",
    "NeForm",
    "SplitKind",
    # Data
    "DatasetManifest",
    "DatasetPreset",
    "Fold",
    "SplitPlan",
    "SynthSpec",
    # Model
    "DEFAULT_LATENT_DIM",
    "EncoderSpec",
    # Reports
    "DiagnosticSummary",
    "EpochLog",
    "GradCheckResult",
    "MetricsReport",
    "SubjectScore",
]
