"""Per-fold training and scoring under a subject-level split plan."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..config import TrainConfig
from ..data.dataset import SegmentDataset
from ..data.segmentation import ChannelStats
from ..errors import BpdError, EmptyDatasetError, FoldError
from ..model import Networks, build_baseline, build_networks, infer
from ..schemas.common import F1Average, ModelKind
from ..schemas.data import Fold, SplitPlan
from ..schemas.report import EpochLog, MetricsReport, SubjectScore
from ..trainer.fit import fit
from .f1 import ConfusionMatrix, classwise_f1, confusion, score_f1

logger = logging.getLogger(__name__)


@dataclass
class FoldResult:
    fold: Fold
    confusion: ConfusionMatrix
    logs: list[EpochLog]
    segments: int


@dataclass
class ProtocolResult:
    report: MetricsReport
    folds: list[FoldResult] = field(default_factory=list)


def build_model(
    kind: ModelKind, dataset: SegmentDataset, config: TrainConfig
) -> Networks:
    spec = config.encoder_spec(dataset.channels, dataset.window_length)
    if kind is ModelKind.BASELINE:
        return build_baseline(spec, dataset.class_count, config.seed, config.dropout_rate)
    return build_networks(spec, dataset.class_count, config.seed, config.dropout_rate)


def _run_fold(
    dataset: SegmentDataset,
    fold: Fold,
    config: TrainConfig,
    kind: ModelKind,
    normalize: bool,
    validation_subjects: Sequence[str],
) -> FoldResult:
    held_out = [s for s in validation_subjects if s in fold.train_subjects]
    train = dataset.subset(s for s in fold.train_subjects if s not in held_out)
    validation = dataset.subset(held_out) if held_out else None
    test = dataset.subset(fold.test_subjects)
    if len(test) == 0:
        raise EmptyDatasetError("test subjects have no segments")

    if normalize:
        stats = ChannelStats.from_segments(train.segments)
        train = train.with_segments(stats.apply(train.segments))
        test = test.with_segments(stats.apply(test.segments))
        if validation is not None:
            validation = validation.with_segments(stats.apply(validation.segments))

    nets = build_model(kind, dataset, config)
    result = fit(nets, train, config, validation)
    predicted = infer(nets, test.segments)
    cm = confusion(test.labels, predicted, dataset.class_count)
    return FoldResult(fold=fold, confusion=cm, logs=result.logs, segments=len(test))


def run_protocol_detailed(
    dataset: SegmentDataset,
    plan: SplitPlan,
    config: TrainConfig,
    model_kind: ModelKind = ModelKind.BPD,
    average: F1Average = F1Average.MACRO,
    normalize: bool = True,
    validation_subjects: Sequence[str] = (),
    threads: int = 1,
    config_hash: str = "",
) -> ProtocolResult:
    """Train and score every fold; rows follow the plan's fold order."""
    fold_config = config.for_model(model_kind)

    def run(fold: Fold) -> FoldResult:
        logger.info(f"{model_kind.value}: fold test={','.join(fold.test_subjects)}")
        try:
            return _run_fold(dataset, fold, fold_config, model_kind, normalize, validation_subjects)
        except (BpdError, ArithmeticError, ValueError) as exc:
            raise FoldError(fold.test_subjects, exc) from exc

    if threads > 1 and len(plan.folds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            folds = list(pool.map(run, plan.folds))
    else:
        folds = [run(fold) for fold in plan.folds]

    rows = [
        SubjectScore(subjects=list(f.fold.test_subjects), f1=score_f1(f.confusion, average), segments=f.segments)
        for f in folds
    ]
    pooled = folds[0].confusion
    for f in folds[1:]:
        pooled = pooled + f.confusion
    report = MetricsReport(
        model=model_kind,
        split=plan.kind,
        average=average,
        rows=rows,
        overall=sum(r.f1 for r in rows) / len(rows),
        classwise=classwise_f1(pooled),
        confusion=[f.confusion.tolist() for f in folds],
        label_names=dict(dataset.label_names),
        config_hash=config_hash,
        seed=config.seed,
    )
    logger.info(f"{model_kind.value}: Avg. F1 {report.overall:.4f} over {len(rows)} folds")
    return ProtocolResult(report=report, folds=folds)


def run_protocol(
    dataset: SegmentDataset,
    plan: SplitPlan,
    config: TrainConfig,
    model_kind: ModelKind = ModelKind.BPD,
    average: F1Average = F1Average.MACRO,
    normalize: bool = True,
    threads: int = 1,
) -> MetricsReport:
    return run_protocol_detailed(
        dataset, plan, config, model_kind, average=average, normalize=normalize, threads=threads
    ).report


def evaluate(
    nets: Networks,
    dataset: SegmentDataset,
    model_kind: ModelKind = ModelKind.BPD,
    average: F1Average = F1Average.MACRO,
    stats: ChannelStats | None = None,
    config_hash: str = "",
    seed: int = 0,
) -> MetricsReport:
    """Score trained networks on every subject of a dataset, one row each."""
    dataset.require_nonempty("evaluation dataset")
    if stats is not None:
        dataset = dataset.with_segments(stats.apply(dataset.segments))
    rows: list[SubjectScore] = []
    matrices: list[ConfusionMatrix] = []
    for subject in sorted(dataset.subject_ids()):
        part = dataset.subset([subject])
        cm = confusion(part.labels, infer(nets, part.segments), dataset.class_count)
        matrices.append(cm)
        rows.append(SubjectScore(subjects=[subject], f1=score_f1(cm, average), segments=len(part)))
    pooled = matrices[0]
    for cm in matrices[1:]:
        pooled = pooled + cm
    return MetricsReport(
        model=model_kind,
        average=average,
        rows=rows,
        overall=sum(r.f1 for r in rows) / len(rows),
        classwise=classwise_f1(pooled),
        confusion=[cm.tolist() for cm in matrices],
        label_names=dict(dataset.label_names),
        config_hash=config_hash,
        seed=seed,
    )
