"""Synthetic benchmark: class waveforms plus fixed per-subject nuisance.

Segment = subject_amplitude * class_wave(frequency * (1 + subject_jitter),
phase + subject_phase) + subject_offset + white noise.
"""

from __future__ import annotations

import configparser
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..schemas.data import SynthSpec
from ..seeding import rng_for
from .dataset import SegmentDataset

logger = logging.getLogger(__name__)


def class_wave(spec: SynthSpec, label: int, freq_scale: float = 1.0, phase: float = 0.0) -> np.ndarray:
    """(channels, window) base pattern of a 1-based class label."""
    k = label - 1
    t = np.arange(spec.window_length) / spec.window_length
    freq = (spec.base_frequency + k * spec.frequency_step) * freq_scale
    channel_phase = np.pi * np.arange(spec.channels)[:, None] / spec.channels
    angle = 2 * np.pi * freq * t[None, :] + channel_phase + phase
    harmonic = (-1.0) ** k * spec.harmonic_weight * np.sin(2 * angle)
    return np.sin(angle) + harmonic


def subject_nuisance(spec: SynthSpec, subject_index: int) -> dict[str, np.ndarray | float]:
    rng = rng_for(spec.seed, "nuisance", subject_index)
    return {
        "amplitude": float(np.exp(spec.nuisance_amplitude * rng.standard_normal())),
        "offset": spec.nuisance_offset * rng.standard_normal(spec.channels),
        "freq_scale": 1.0 + spec.nuisance_frequency * rng.standard_normal(),
        "phase": spec.nuisance_phase * rng.uniform(-np.pi, np.pi),
    }


def generate_synthetic(spec: SynthSpec) -> SegmentDataset:
    """K * S * segments_per_subject_per_class segments ordered by subject, class, repeat."""
    n_rep = spec.segments_per_subject_per_class
    segments, labels, subjects = [], [], []
    for s, subject in enumerate(spec.subject_ids()):
        nuisance = subject_nuisance(spec, s)
        noise_rng = rng_for(spec.seed, "noise", s)
        for label in range(1, spec.class_count + 1):
            wave = class_wave(spec, label, float(nuisance["freq_scale"]), float(nuisance["phase"]))
            pattern = nuisance["amplitude"] * wave + np.asarray(nuisance["offset"])[:, None]
            noise = spec.noise_std * noise_rng.standard_normal((n_rep, spec.channels, spec.window_length))
            segments.append(pattern[None, :, :] + noise)
            labels.extend([label] * n_rep)
            subjects.extend([subject] * n_rep)

    dataset = SegmentDataset(
        segments=np.concatenate(segments),
        labels=labels,
        subjects=subjects,
        class_count=spec.class_count,
        label_names={k: f"class_{k}" for k in range(1, spec.class_count + 1)},
    )
    logger.info(
        f"Generated synthetic dataset: K={spec.class_count} S={spec.subject_count} "
        f"segments={len(dataset)} seed={spec.seed}"
    )
    return dataset


def write_synthetic(dataset: SegmentDataset, spec: SynthSpec, out_dir: Path | str) -> Path:
    """Per-subject CSV streams plus ``manifest.ini``; returns the manifest path.

    Segments are laid end to end, so the manifest declares ``overlap = 0`` and
    the segment length as window.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    subjects: dict[str, str] = {}
    for subject in dataset.subject_ids():
        part = dataset.subset([subject])
        stream = part.segments.transpose(1, 0, 2).reshape(dataset.channels, -1)
        frame = pd.DataFrame(stream.T, columns=[f"ch{c + 1}" for c in range(dataset.channels)])
        frame.insert(0, "timestamp", np.arange(stream.shape[1]) / spec.sampling_rate)
        frame["label"] = np.repeat(part.labels, dataset.window_length)
        name = f"{subject}.csv"
        frame.to_csv(out / name, header=False, index=False, float_format="%.6f")
        subjects[subject] = name

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    parser["dataset"] = {
        "name": "synthetic",
        "sampling_rate": str(spec.sampling_rate),
        "channels": str(dataset.channels),
        "window_length": str(dataset.window_length),
        "overlap": "0",
    }
    parser["labels"] = {str(k): dataset.label_names.get(k, f"class_{k}") for k in range(1, dataset.class_count + 1)}
    parser["subjects"] = subjects
    manifest = out / "manifest.ini"
    with manifest.open("w", encoding="utf-8") as handle:
        parser.write(handle)
    logger.info(f"Wrote {len(subjects)} subject streams and {manifest}")
    return manifest
