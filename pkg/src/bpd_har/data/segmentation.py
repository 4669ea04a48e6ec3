"""Sliding-window segmentation and per-channel normalization."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeMismatchError

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-8


class Windows(NamedTuple):
    segments: np.ndarray  # (n, channels, window)
    labels: np.ndarray  # (n,)
    starts: np.ndarray  # (n,) first sample of each window


def window_stride(window: int, overlap: float) -> int:
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")
    return max(1, int(round(window * (1.0 - overlap))))


def window_count(length: int, window: int, overlap: float) -> int:
    """floor((T - window) / stride) + 1, or 0 when the stream is shorter than a window."""
    if length < window:
        return 0
    return (length - window) // window_stride(window, overlap) + 1


def majority_label(labels: np.ndarray) -> int:
    """Most frequent label; ties go to the lowest label."""
    values, counts = np.unique(labels, return_counts=True)
    return int(values[np.argmax(counts)])


def segment_stream(
    raw: np.ndarray,
    labels: np.ndarray,
    window: int,
    overlap: float,
    null_label: int | None = None,
) -> Windows:
    """Cut a (channels, T) stream into labelled windows.

    Windows whose majority label equals ``null_label`` are dropped.
    """
    raw = np.asarray(raw)
    labels = np.asarray(labels)
    if raw.ndim != 2:
        raise ShapeMismatchError("segment_stream", f"expected (channels, T), got {raw.shape}")
    if labels.shape != (raw.shape[1],):
        raise ShapeMismatchError(
            "segment_stream", f"{labels.size} labels for a stream of {raw.shape[1]} samples"
        )
    if raw.shape[1] < window:
        raise ShapeMismatchError(
            "segment_stream", f"stream of {raw.shape[1]} samples is shorter than window {window}"
        )

    stride = window_stride(window, overlap)
    count = window_count(raw.shape[1], window, overlap)
    starts = np.arange(count) * stride
    views = sliding_window_view(raw, window, axis=1)[:, starts, :]  # (C, n, window)
    segments = np.ascontiguousarray(views.transpose(1, 0, 2))
    window_labels = np.array(
        [majority_label(labels[s : s + window]) for s in starts], dtype=np.int64
    )

    if null_label is not None:
        keep = window_labels != null_label
        dropped = int((~keep).sum())
        if dropped:
            logger.debug(f"dropped {dropped} of {count} windows with the null label")
        segments, window_labels, starts = segments[keep], window_labels[keep], starts[keep]
    return Windows(segments, window_labels, starts)


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel mean and floored standard deviation of training segments."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def from_segments(cls, segments: np.ndarray) -> ChannelStats:
        data = np.asarray(segments, dtype=np.float64)
        if data.ndim != 3 or data.shape[0] == 0:
            raise ShapeMismatchError("normalize", f"expected non-empty (n, C, T) segments, got {data.shape}")
        mean = data.mean(axis=(0, 2))
        std = np.maximum(data.std(axis=(0, 2)), STD_FLOOR)
        return cls(mean=mean, std=std)

    def apply(self, segments: np.ndarray) -> np.ndarray:
        data = np.asarray(segments, dtype=np.float64)
        if data.ndim != 3 or data.shape[1] != self.mean.shape[0]:
            raise ShapeMismatchError(
                "normalize", f"stats cover {self.mean.shape[0]} channels, segments are {data.shape}"
            )
        return ((data - self.mean[None, :, None]) / self.std[None, :, None]).astype(np.float32)


def normalize(train_segments: np.ndarray, apply_to: np.ndarray) -> tuple[np.ndarray, ChannelStats]:
    """Z-score ``apply_to`` with statistics taken from ``train_segments`` only."""
    stats = ChannelStats.from_segments(train_segments)
    return stats.apply(apply_to), stats
