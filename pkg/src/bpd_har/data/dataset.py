"""In-memory segment collections."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDatasetError, ShapeMismatchError


@dataclass
class SegmentDataset:
    """Windowed multichannel segments with a 1-based label and a subject per segment."""

    segments: np.ndarray  # (num_segments, channels, window_length)
    labels: np.ndarray  # (num_segments,) in [1, class_count]
    subjects: np.ndarray  # (num_segments,) subject identifiers
    class_count: int
    label_names: dict[int, str] = field(default_factory=dict)
    segment_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.segments = np.asarray(self.segments, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.subjects = np.asarray(self.subjects, dtype=str)
        if self.segment_ids is None:
            self.segment_ids = np.arange(len(self.labels), dtype=np.int64)
        else:
            self.segment_ids = np.asarray(self.segment_ids, dtype=np.int64)
        if self.segments.ndim != 3:
            raise ShapeMismatchError(
                "SegmentDataset", f"segments must be (n, channels, window), got {self.segments.shape}"
            )
        lengths = {len(self.segments), len(self.labels), len(self.subjects), len(self.segment_ids)}
        if len(lengths) != 1:
            raise ShapeMismatchError(
                "SegmentDataset",
                f"per-segment arrays differ in length: segments={len(self.segments)} "
                f"labels={len(self.labels)} subjects={len(self.subjects)}",
            )
        if self.class_count < 2:
            raise ValueError(f"class_count must be at least 2, got {self.class_count}")
        if self.labels.size and (self.labels.min() < 1 or self.labels.max() > self.class_count):
            raise ValueError(f"labels must lie in [1, {self.class_count}]")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def channels(self) -> int:
        return self.segments.shape[1]

    @property
    def window_length(self) -> int:
        return self.segments.shape[2]

    @property
    def ids(self) -> np.ndarray:
        assert self.segment_ids is not None
        return self.segment_ids

    def subject_ids(self) -> list[str]:
        """Distinct subjects in order of first appearance."""
        seen: dict[str, None] = {}
        for subject in self.subjects.tolist():
            seen.setdefault(subject, None)
        return list(seen)

    def select(self, mask: np.ndarray) -> SegmentDataset:
        return SegmentDataset(
            segments=self.segments[mask],
            labels=self.labels[mask],
            subjects=self.subjects[mask],
            class_count=self.class_count,
            label_names=dict(self.label_names),
            segment_ids=self.ids[mask],
        )

    def subset(self, subjects: Iterable[str]) -> SegmentDataset:
        wanted = set(subjects)
        return self.select(np.isin(self.subjects, sorted(wanted)))

    def with_segments(self, segments: np.ndarray) -> SegmentDataset:
        return SegmentDataset(
            segments=segments,
            labels=self.labels,
            subjects=self.subjects,
            class_count=self.class_count,
            label_names=dict(self.label_names),
            segment_ids=self.ids,
        )

    def require_nonempty(self, what: str = "dataset") -> None:
        if len(self) == 0:
            raise EmptyDatasetError(f"{what} has no segments")

    @classmethod
    def concat(cls, parts: Sequence[SegmentDataset], renumber: bool = True) -> SegmentDataset:
        if not parts:
            raise EmptyDatasetError("nothing to concatenate")
        first = parts[0]
        ids = np.concatenate([p.ids for p in parts])
        return cls(
            segments=np.concatenate([p.segments for p in parts]),
            labels=np.concatenate([p.labels for p in parts]),
            subjects=np.concatenate([p.subjects for p in parts]),
            class_count=first.class_count,
            label_names=dict(first.label_names),
            segment_ids=np.arange(len(ids)) if renumber else ids,
        )
