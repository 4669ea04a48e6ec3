"""Segments, windowing, manifests, splits and the synthetic benchmark."""

from .dataset import SegmentDataset
from .manifest import DATASET_PRESETS, load_manifest, parse_manifest, read_sensor_file
from .segmentation import ChannelStats, Windows, normalize, segment_stream, window_count, window_stride
from .splits import plan_splits
from .synthetic import generate_synthetic, write_synthetic

__all__ = [
    "DATASET_PRESETS",
    "ChannelStats",
    "SegmentDataset",
    "Windows",
    "generate_synthetic",
    "load_manifest",
    "normalize",
    "parse_manifest",
    "plan_splits",
    "read_sensor_file",
    "segment_stream",
    "window_count",
    "window_stride",
    "write_synthetic",
]
