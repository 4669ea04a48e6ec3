"""F1 scoring, trajectory diagnostics and table rendering.

The fold runner lives in ``bpd_har.metrics.protocol``.
"""

from .diagnostics import diagnostics
from .f1 import ConfusionMatrix, classwise_f1, confusion, macro_f1, score_f1, weighted_f1
from .report import render_classwise, render_comparison, render_table

__all__ = [
    "ConfusionMatrix",
    "classwise_f1",
    "confusion",
    "diagnostics",
    "macro_f1",
    "render_classwise",
    "render_comparison",
    "render_table",
    "score_f1",
    "weighted_f1",
]
