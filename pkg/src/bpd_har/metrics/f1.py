"""Confusion matrices and F1 scores.

A class with no true and no predicted instances has no F1 (``None``) and is left
out of the macro mean; a class with instances but no true positives scores 0.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import confusion_matrix

from ..errors import EmptyDatasetError, ShapeMismatchError
from ..schemas.common import F1Average


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts; rows are true classes, columns predicted (label k at index k-1)."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ShapeMismatchError("ConfusionMatrix", f"expected a square matrix, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def class_count(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: ConfusionMatrix) -> ConfusionMatrix:
        if other.class_count != self.class_count:
            raise ShapeMismatchError("ConfusionMatrix", f"K={self.class_count} vs K={other.class_count}")
        return ConfusionMatrix(self.counts + other.counts)

    def tolist(self) -> list[list[int]]:
        return self.counts.tolist()


def confusion(
    true_labels: Sequence[int] | np.ndarray,
    predicted: Sequence[int] | np.ndarray,
    class_count: int,
) -> ConfusionMatrix:
    """Count matrix over 1-based labels 1..class_count."""
    labels = list(range(1, class_count + 1))
    if len(true_labels) == 0:
        return ConfusionMatrix(np.zeros((class_count, class_count), dtype=np.int64))
    return ConfusionMatrix(confusion_matrix(true_labels, predicted, labels=labels))


def _require_counts(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise EmptyDatasetError("F1 of an empty confusion matrix is undefined")


def classwise_f1(cm: ConfusionMatrix) -> list[float | None]:
    _require_counts(cm)
    scores: list[float | None] = []
    for k in range(cm.class_count):
        tp = int(cm.counts[k, k])
        fn = int(cm.counts[k, :].sum()) - tp
        fp = int(cm.counts[:, k].sum()) - tp
        if tp + fn + fp == 0:
            scores.append(None)
        elif tp == 0:
            scores.append(0.0)
        else:
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            scores.append(2 * precision * recall / (precision + recall))
    return scores


def macro_f1(cm: ConfusionMatrix) -> float:
    present = [s for s in classwise_f1(cm) if s is not None]
    return sum(present) / len(present)


def weighted_f1(cm: ConfusionMatrix) -> float:
    """Per-class F1 weighted by true-class support."""
    scores = classwise_f1(cm)
    support = cm.counts.sum(axis=1)
    return sum(int(n) * s for s, n in zip(scores, support) if s is not None and n > 0) / cm.total


def score_f1(cm: ConfusionMatrix, average: F1Average = F1Average.MACRO) -> float:
    if average is F1Average.WEIGHTED:
        return weighted_f1(cm)
    return macro_f1(cm)
