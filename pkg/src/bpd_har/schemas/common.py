"""Shared enumerations for bpd_har records."""

from enum import Enum


class EncoderKind(str, Enum):
    """Backbone producing the initial representation E(x)."""

    CNN = "cnn"
    CONVLSTM = "convlstm"


class HeadKind(str, Enum):
    """Small networks sitting on top of the encoder."""

    DISENTANGLER = "disentangler"
    CLASSIFIER = "classifier"
    RECONSTRUCTOR = "reconstructor"
    MI_NETWORK = "mi_network"


class MineMode(str, Enum):
    """How the dependency-reduction phase treats the statistics network."""

    LITERAL = "literal"
    MINIMAX = "minimax"


class NeForm(str, Enum):
    """Reading of the negative-entropy objective."""

    ENTROPY = "entropy"
    TRUE_CLASS = "true_class"


class ModelKind(str, Enum):
    """Model variants a protocol can train and score."""

    BASELINE = "baseline"
    BPD = "bpd"
    BPD_NO_DEPENDENCY = "bpd_no_dependency"
    BPD_NO_RECON = "bpd_no_recon"


class SplitKind(str, Enum):
    """Subject-level evaluation protocols."""

    LOSO = "loso"
    HOLDOUT = "holdout"


class F1Average(str, Enum):
    """Averaging rule over per-class F1 values."""

    MACRO = "macro"
    WEIGHTED = "weighted"


class FeatureField(str, Enum):
    """Representations that can be exported per segment."""

    ENC = "enc"
    Z_SIG = "z_sig"
    Z_RED = "z_red"


class CheckStatus(str, Enum):
    """Outcome of a gradient check."""

    PASS = "PASS"
    FAIL = "FAIL"
