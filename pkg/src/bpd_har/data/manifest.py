"""Dataset manifests and per-subject sensor files.

A manifest is an INI file::

    [dataset]
    name = PAMAP2
    sampling_rate = 100
    channels = 52
    null_label = 0
    ; optional defaults for the run config
    window_length = 168
    overlap = 0.5

    [labels]
    1 = lying
    2 = sitting

    [subjects]
    101 = subject101.dat

Sensor files hold one sample per row: timestamp, channel_1..channel_C, label code,
separated by commas or whitespace (detected per file). Missing channel values
are forward-filled, then back-filled.
"""

from __future__ import annotations

import configparser
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..config import DEFAULT_OVERLAP, DEFAULT_WINDOW
from ..errors import (
    ChannelCountMismatchError,
    EmptyDatasetError,
    ManifestError,
    ShapeMismatchError,
    UnknownLabelError,
)
from ..runtime import default_thread_count
from ..schemas.data import DatasetManifest, DatasetPreset
from .dataset import SegmentDataset
from .segmentation import segment_stream

logger = logging.getLogger(__name__)

NULL_INDEX = 0

DATASET_PRESETS: dict[str, DatasetPreset] = {
    "pamap2": DatasetPreset(
        name="PAMAP2", subjects=8, activities=12, sampling_rate=100, channels=52,
        positions="hand, chest, ankle",
    ),
    "mhealth": DatasetPreset(
        name="MHEALTH", subjects=10, activities=12, sampling_rate=50, channels=23,
        positions="chest, right wrist, left ankle",
    ),
    "dsads": DatasetPreset(
        name="DSADS", subjects=8, activities=19, sampling_rate=25, channels=45,
        positions="torso, arms, legs",
    ),
    "gotov": DatasetPreset(
        name="GOTOV", subjects=35, activities=16, sampling_rate=83, channels=3,
        positions="ankle, wrist, chest",
    ),
}


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    return parser


def parse_manifest(path: Path | str) -> DatasetManifest:
    path = Path(path)
    parser = _parser()
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}", str(path)) from exc
    except configparser.Error as exc:
        raise ManifestError(f"malformed manifest: {exc}", str(path)) from exc

    for section in ("dataset", "labels", "subjects"):
        if not parser.has_section(section):
            raise ManifestError(f"missing [{section}] section", str(path))
    payload = {
        **dict(parser.items("dataset")),
        "labels": dict(parser.items("labels")),
        "subjects": dict(parser.items("subjects")),
        "base_dir": path.parent,
    }
    try:
        manifest = DatasetManifest.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ManifestError(f"invalid manifest value at {where}: {first['msg']}", str(path)) from exc
    check_preset(manifest)
    return manifest


def check_preset(manifest: DatasetManifest) -> None:
    preset = DATASET_PRESETS.get(manifest.name.lower())
    if preset is not None and preset.channels != manifest.channels:
        logger.warning(
            f"manifest {manifest.name} declares {manifest.channels} channels; "
            f"the published dataset has {preset.channels}"
        )


def _delimiter(path: Path) -> str:
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                return "," if "," in line else r"\s+"
    return ","


def _has_header(path: Path, sep: str) -> bool:
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                first = line.split(",")[0] if sep == "," else line.split()[0]
                try:
                    float(first)
                except ValueError:
                    return True
                return False
    return False


def read_sensor_file(path: Path, manifest: DatasetManifest) -> tuple[np.ndarray, np.ndarray]:
    """(channels, T) values and 1-based labels (0 for the null label) of one file."""
    if not path.exists():
        raise ManifestError("sensor file not found", str(path))
    sep = _delimiter(path)
    header = _has_header(path, sep)
    first_line = 2 if header else 1
    try:
        frame = pd.read_csv(
            path, sep=sep, header=None, skiprows=1 if header else 0, dtype=str, skip_blank_lines=True
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ManifestError(f"cannot parse sensor file: {exc}", str(path)) from exc

    expected = manifest.channels + 2
    if frame.shape[1] != expected:
        raise ChannelCountMismatchError(
            f"expected {manifest.channels} channels ({expected} columns), found {frame.shape[1] - 2}",
            str(path),
            first_line,
        )

    raw = frame.iloc[:, 1 : 1 + manifest.channels]
    values = raw.apply(pd.to_numeric, errors="coerce")
    garbage = values.isna() & raw.notna()
    if garbage.to_numpy().any():
        row = int(np.argmax(garbage.to_numpy().any(axis=1)))
        raise ManifestError("non-numeric sensor value", str(path), first_line + row)
    values = values.ffill().bfill()
    if values.isna().to_numpy().any():
        raise ManifestError("a channel has no values at all", str(path))

    index = manifest.label_index()
    codes = frame.iloc[:, -1]
    labels = np.empty(len(frame), dtype=np.int64)
    for row, code in enumerate(codes.tolist()):
        code = "" if pd.isna(code) else str(code).strip()
        if code in index:
            labels[row] = index[code]
        elif manifest.null_label is not None and code == manifest.null_label:
            labels[row] = NULL_INDEX
        else:
            raise UnknownLabelError(f"unknown label code {code!r}", str(path), first_line + row)
    return values.to_numpy(dtype=np.float64).T, labels


def _load_subject(
    manifest: DatasetManifest, subject: str, window: int, overlap: float
) -> SegmentDataset | None:
    path = manifest.subject_path(subject)
    raw, labels = read_sensor_file(path, manifest)
    null = NULL_INDEX if manifest.null_label is not None else None
    try:
        windows = segment_stream(raw, labels, window, overlap, null_label=null)
    except ShapeMismatchError as exc:
        raise ManifestError(str(exc), str(path)) from exc
    logger.info(f"subject {subject}: {raw.shape[1]} samples -> {len(windows.labels)} segments")
    if len(windows.labels) == 0:
        return None
    return SegmentDataset(
        segments=windows.segments,
        labels=windows.labels,
        subjects=[subject] * len(windows.labels),
        class_count=manifest.class_count,
        label_names=manifest.label_names(),
    )


def load_manifest(
    path: Path | str,
    window: int | None = None,
    overlap: float | None = None,
    threads: int | None = None,
) -> tuple[DatasetManifest, SegmentDataset]:
    """Parse a manifest, load every subject file and concatenate in manifest order.

    ``window``/``overlap`` override the manifest's own keys, which override the
    168-sample, 50% defaults.
    """
    manifest = parse_manifest(path)
    window = window or manifest.window_length or DEFAULT_WINDOW
    if overlap is None:
        overlap = manifest.overlap if manifest.overlap is not None else DEFAULT_OVERLAP
    subjects = list(manifest.subjects)
    if not subjects:
        raise EmptyDatasetError(f"{path}: manifest lists no subjects")

    workers = threads or default_thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: _load_subject(manifest, s, window, overlap), subjects))
    loaded = [p for p in parts if p is not None]
    if not loaded:
        raise EmptyDatasetError(f"{path}: no segments after windowing")
    dataset = SegmentDataset.concat(loaded)
    logger.info(
        f"Loaded {manifest.name}: {len(subjects)} subjects, {len(dataset)} segments "
        f"(window {window}, overlap {overlap})"
    )
    return manifest, dataset
