"""Subject-level split planning."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import numpy as np
from sklearn.model_selection import LeaveOneGroupOut

from ..errors import ConfigError, EmptyDatasetError
from ..schemas.common import SplitKind
from ..schemas.data import Fold, SplitPlan
from .dataset import SegmentDataset

logger = logging.getLogger(__name__)


def _loso(subjects: list[str]) -> list[Fold]:
    groups = np.asarray(subjects)
    folds = []
    for train_idx, test_idx in LeaveOneGroupOut().split(np.zeros((len(groups), 1)), groups=groups):
        folds.append(
            Fold(
                train_subjects=tuple(groups[train_idx].tolist()),
                test_subjects=tuple(groups[test_idx].tolist()),
            )
        )
    return folds


def plan_splits(
    dataset: SegmentDataset | Iterable[str],
    kind: SplitKind,
    holdout_test_subjects: Iterable[str] | None = None,
) -> SplitPlan:
    """One fold per subject (sorted) for LOSO, or a single train/test fold."""
    subjects = sorted(
        dataset.subject_ids() if isinstance(dataset, SegmentDataset) else set(dataset)
    )
    if len(subjects) < 2:
        raise EmptyDatasetError(f"a split needs at least 2 subjects, got {len(subjects)}")

    if kind is SplitKind.LOSO:
        return SplitPlan(kind=kind, folds=_loso(subjects))

    test = sorted(set(holdout_test_subjects or ()))
    if not test:
        raise ConfigError("holdout needs at least one test subject")
    unknown = [s for s in test if s not in subjects]
    if unknown:
        raise ConfigError(f"unknown test subject(s): {', '.join(unknown)}")
    train = tuple(s for s in subjects if s not in test)
    if not train:
        raise ConfigError("holdout leaves no training subjects")
    logger.info(f"holdout split: {len(train)} train / {len(test)} test subjects")
    return SplitPlan(kind=kind, folds=[Fold(train_subjects=train, test_subjects=tuple(test))])
