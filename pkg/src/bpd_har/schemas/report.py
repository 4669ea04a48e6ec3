"""Training logs and evaluation reports."""

from pydantic import BaseModel, Field

from .common import F1Average, ModelKind, SplitKind


class EpochLog(BaseModel):
    """Per-epoch means over mini-batches."""

    epoch: int = Field(ge=1)
    ce: float
    ne: float
    recon: float
    mine: float
    entropy: float = Field(description="Mean Shannon entropy of C' outputs, nats")
    batches: int = Field(ge=0)
    val_f1: float | None = None


class SubjectScore(BaseModel):
    """One report row: the test subjects of a fold and their F1."""

    subjects: list[str]
    f1: float
    segments: int


class MetricsReport(BaseModel):
    model: ModelKind
    split: SplitKind | None = None
    average: F1Average = F1Average.MACRO
    rows: list[SubjectScore]
    overall: float
    classwise: list[float | None]
    confusion: list[list[list[int]]] = Field(description="One K x K matrix per row")
    label_names: dict[int, str] = {}
    config_hash: str = ""
    seed: int = 0

    def label(self, row: SubjectScore) -> str:
        return "+".join(row.subjects)


class DiagnosticSummary(BaseModel):
    """Loss and entropy trajectories with first/last comparisons."""

    epochs: int
    mine: list[float]
    entropy: list[float]
    recon: list[float]
    mine_first: float
    mine_last: float
    entropy_first: float
    entropy_last: float
    mine_decreased: bool
    entropy_increased: bool
    recon_improved: bool
    max_entropy: float | None = None
