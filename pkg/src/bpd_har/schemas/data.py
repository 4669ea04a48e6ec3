"""Dataset, synthetic benchmark and split records."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .common import SplitKind


class DatasetManifest(BaseModel):
    """Metadata and per-subject files of one sensor dataset.

    ``labels`` maps external label codes to activity names; its insertion order
    fixes the internal label index (first entry is label 1).
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    sampling_rate: float = Field(gt=0)
    channels: int = Field(gt=0)
    labels: dict[str, str]
    null_label: str | None = None
    subjects: dict[str, Path] = {}
    window_length: int | None = Field(default=None, gt=0)
    overlap: float | None = Field(default=None, ge=0.0, lt=1.0)
    base_dir: Path = Path(".")

    @model_validator(mode="after")
    def _check_labels(self) -> "DatasetManifest":
        if len(self.labels) < 2:
            raise ValueError("manifest needs at least two activity labels")
        if self.null_label is not None and self.null_label in self.labels:
            raise ValueError(f"null_label {self.null_label!r} must not be an activity label")
        names = list(self.labels.values())
        if len(set(names)) != len(names):
            raise ValueError("label names must be distinct")
        return self

    @property
    def class_count(self) -> int:
        return len(self.labels)

    def label_index(self) -> dict[str, int]:
        """External code -> 1-based internal label."""
        return {code: i + 1 for i, code in enumerate(self.labels)}

    def label_names(self) -> dict[int, str]:
        return {i + 1: name for i, name in enumerate(self.labels.values())}

    def subject_path(self, subject: str) -> Path:
        path = self.subjects[subject]
        return path if path.is_absolute() else self.base_dir / path


class DatasetPreset(BaseModel):
    """Published shape of a public HAR dataset."""

    model_config = ConfigDict(frozen=True)

    name: str
    subjects: int
    activities: int
    sampling_rate: float
    channels: int
    positions: str


class SynthSpec(BaseModel):
    """Parameters of the synthetic benchmark.

    Each class owns a base frequency and harmonic mix; each subject draws an
    amplitude scale, baseline offset, phase shift and frequency jitter once and
    applies them to all of its segments.
    """

    model_config = ConfigDict(extra="forbid")

    class_count: int = Field(default=4, ge=2)
    subject_count: int = Field(default=8, ge=2)
    channels: int = Field(default=3, gt=0)
    window_length: int = Field(default=168, gt=0)
    segments_per_subject_per_class: int = Field(default=30, gt=0)
    base_frequency: float = Field(default=2.0, gt=0)
    frequency_step: float = Field(default=1.5, gt=0)
    harmonic_weight: float = Field(default=0.4, ge=0)
    nuisance_amplitude: float = Field(default=0.5, ge=0)
    nuisance_offset: float = Field(default=0.5, ge=0)
    nuisance_frequency: float = Field(default=0.1, ge=0)
    nuisance_phase: float = Field(default=1.0, ge=0)
    noise_std: float = Field(default=0.2, ge=0)
    sampling_rate: float = Field(default=50.0, gt=0)
    seed: int = 0

    @property
    def segment_count(self) -> int:
        return self.class_count * self.subject_count * self.segments_per_subject_per_class

    def subject_ids(self) -> list[str]:
        width = len(str(self.subject_count))
        return [f"s{i + 1:0{width}d}" for i in range(self.subject_count)]


class Fold(BaseModel):
    model_config = ConfigDict(frozen=True)

    train_subjects: tuple[str, ...]
    test_subjects: tuple[str, ...]


class SplitPlan(BaseModel):
    kind: SplitKind
    folds: list[Fold]

    @model_validator(mode="after")
    def _check_folds(self) -> "SplitPlan":
        for fold in self.folds:
            if set(fold.train_subjects) & set(fold.test_subjects):
                raise ValueError("train and test subjects overlap")
        if self.kind is SplitKind.HOLDOUT and len(self.folds) != 1:
            raise ValueError("a holdout plan has exactly one fold")
        return self
