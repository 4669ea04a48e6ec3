"""Command-line entry point: ``bpd train | loso | holdout | eval | synth | gradcheck | export-features``."""

from __future__ import annotations

import functools
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click

from . import __version__
from .config import RunConfig, load_run_config, write_run_config
from .data import generate_synthetic, load_manifest, plan_splits, write_synthetic
from .data.dataset import SegmentDataset
from .data.segmentation import ChannelStats
from .errors import BpdError, ConfigError
from .gradcheck import render_gradchecks, run_all_gradchecks
from .json_util import append_jsonl, hash_config, stable_dumps, write_json
from .metrics import diagnostics, render_classwise, render_comparison
from .metrics.protocol import build_model, evaluate, run_protocol_detailed
from .model import BpdNetworks, export_features
from .schemas.common import CheckStatus, FeatureField, ModelKind, SplitKind
from .schemas.report import EpochLog
from .seeding import utcnow
from .trainer import fit, load_checkpoint, save_checkpoint

logger = logging.getLogger(__name__)

MODEL_CHOICES = click.Choice([kind.value for kind in ModelKind])


def _reports_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn library and I/O errors into a one-line message and exit code 1."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except (BpdError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _config(path: Path | None, seed: int | None) -> RunConfig:
    config = load_run_config(path) if path is not None else RunConfig()
    return config.with_seed(seed)


def load_dataset(config: RunConfig) -> SegmentDataset:
    if config.data.source == "synthetic":
        return generate_synthetic(config.synth)
    assert config.data.manifest is not None
    _, dataset = load_manifest(
        config.data.manifest,
        window=config.data.window_length,
        overlap=config.data.overlap,
        threads=config.protocol.fold_threads,
    )
    return dataset


def run_dir(out: Path | None, config: RunConfig) -> Path:
    """``--out`` verbatim, else ``runs/<UTC timestamp>-<config hash[:8]>``."""
    if out is None:
        stamp = utcnow().strftime("%Y%m%dT%H%M%SZ")
        out = Path("runs") / f"{stamp}-{hash_config(config)[:8]}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_files(directory: Path, config: RunConfig, command: str) -> None:
    write_run_config(config, directory / "resolved_config.ini")
    write_json(
        directory / "metadata.json",
        {
            "command": command,
            "created_at": utcnow().isoformat(),
            "config_hash": hash_config(config),
            "seed": config.train.seed,
            "version": __version__,
        },
    )


config_option = click.option(
    "--config", "config_path", type=click.Path(path_type=Path), default=None, help="Run config (INI)."
)
out_option = click.option("--out", type=click.Path(path_type=Path), default=None, help="Run directory.")
seed_option = click.option("--seed", type=int, default=None, help="Overrides [train] seed.")


@click.group()
@click.version_option(__version__, prog_name="bpd")
@click.option("--verbose", "-v", is_flag=True, help="Log per-step details.")
def main(verbose: bool) -> None:
    """Behaviour pattern disentanglement for activity recognition."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )


@main.command("train")
@config_option
@out_option
@seed_option
@click.option("--model", type=MODEL_CHOICES, default=None, help="Overrides [protocol] model.")
@_reports_errors
def cmd_train(config_path: Path | None, out: Path | None, seed: int | None, model: str | None) -> None:
    """Train one model on the training portion of the configured split."""
    config = _config(config_path, seed).with_model(ModelKind(model) if model else None)
    dataset = load_dataset(config)
    kind = config.protocol.model
    train_config = config.train.for_model(kind)

    subjects = dataset.subject_ids()
    if config.protocol.kind is SplitKind.HOLDOUT:
        plan = plan_splits(dataset, SplitKind.HOLDOUT, config.protocol.test_subjects)
        subjects = list(plan.folds[0].train_subjects)
    validation_subjects = [s for s in config.protocol.validation_subjects if s in subjects]
    train = dataset.subset(s for s in subjects if s not in validation_subjects)
    validation = dataset.subset(validation_subjects) if validation_subjects else None

    stats = None
    if config.data.normalize:
        stats = ChannelStats.from_segments(train.segments)
        train = train.with_segments(stats.apply(train.segments))
        if validation is not None:
            validation = validation.with_segments(stats.apply(validation.segments))

    directory = run_dir(out, config)
    _write_run_files(directory, config, "train")
    log_path = directory / "epochs.jsonl"
    log_path.write_text("", encoding="utf-8")

    nets = build_model(kind, dataset, train_config)
    result = fit(
        nets, train, train_config, validation, on_epoch=lambda log: append_jsonl(log_path, log)
    )
    save_checkpoint(
        directory / "checkpoint.npz",
        nets,
        result.optimizers,
        train_config,
        kind,
        stats,
        dataset.label_names,
    )
    write_json(directory / "diagnostics.json", diagnostics(result.logs, dataset.class_count))
    click.echo(f"trained {kind.value} for {len(result.logs)} epochs -> {directory}")


def _run_protocol_command(
    kind: SplitKind,
    config_path: Path | None,
    out: Path | None,
    seed: int | None,
    models: tuple[str, ...],
) -> None:
    config = _config(config_path, seed)
    if kind is SplitKind.HOLDOUT and not config.protocol.test_subjects:
        raise ConfigError("holdout needs [protocol] test_subjects")
    dataset = load_dataset(config)
    plan = plan_splits(dataset, kind, config.protocol.test_subjects)
    kinds = [ModelKind(m) for m in models] or [config.protocol.model]

    config_hash = hash_config(config)
    reports = []
    for model in kinds:
        result = run_protocol_detailed(
            dataset,
            plan,
            config.train,
            model,
            average=config.protocol.f1_average,
            normalize=config.data.normalize,
            validation_subjects=config.protocol.validation_subjects,
            threads=config.protocol.fold_threads,
            config_hash=config_hash,
        )
        reports.append((model, result))

    directory = run_dir(out, config)
    _write_run_files(directory, config, kind.value)
    for model, result in reports:
        write_json(directory / f"report-{model.value}.json", result.report)
        with (directory / f"epochs-{model.value}.jsonl").open("w", encoding="utf-8") as handle:
            for fold in result.folds:
                tag = "+".join(fold.fold.test_subjects)
                for log in fold.logs:
                    handle.write(_fold_line(tag, log))
    table = render_comparison([r.report for _, r in reports])
    classwise = render_classwise([r.report for _, r in reports], dataset.label_names)
    (directory / "report.txt").write_text(table + "\n" + classwise, encoding="utf-8")
    click.echo(table)


def _fold_line(fold: str, log: EpochLog) -> str:
    return stable_dumps({"fold": fold, **log.model_dump(mode="json")}) + "\n"


@main.command("loso")
@config_option
@out_option
@seed_option
@click.option("--model", "models", type=MODEL_CHOICES, multiple=True, help="Repeat to compare models.")
@_reports_errors
def cmd_loso(config_path: Path | None, out: Path | None, seed: int | None, models: tuple[str, ...]) -> None:
    """Leave-one-subject-out training and per-subject F1."""
    _run_protocol_command(SplitKind.LOSO, config_path, out, seed, models)


@main.command("holdout")
@config_option
@out_option
@seed_option
@click.option("--model", "models", type=MODEL_CHOICES, multiple=True, help="Repeat to compare models.")
@_reports_errors
def cmd_holdout(config_path: Path | None, out: Path | None, seed: int | None, models: tuple[str, ...]) -> None:
    """Train on all but [protocol] test_subjects and score the held-out group."""
    _run_protocol_command(SplitKind.HOLDOUT, config_path, out, seed, models)


@main.command("eval")
@click.option("--checkpoint", type=click.Path(exists=True, path_type=Path), required=True)
@config_option
@out_option
@_reports_errors
def cmd_eval(checkpoint: Path, config_path: Path | None, out: Path | None) -> None:
    """Score a checkpoint on the configured dataset, one row per subject."""
    config = _config(config_path, None)
    dataset = load_dataset(config)
    ckpt = load_checkpoint(checkpoint)
    ckpt.check_dataset(dataset)
    report = evaluate(
        ckpt.nets,
        dataset,
        ckpt.model,
        config.protocol.f1_average,
        stats=ckpt.channel_stats,
        config_hash=hash_config(config),
        seed=ckpt.config.seed,
    )
    table = render_comparison([report])
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "report.json", report)
        (out / "report.txt").write_text(table, encoding="utf-8")
    click.echo(table)


@main.command("synth")
@config_option
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Output directory.")
@seed_option
@_reports_errors
def cmd_synth(config_path: Path | None, out: Path, seed: int | None) -> None:
    """Write the synthetic benchmark as sensor files plus a manifest."""
    config = load_run_config(config_path) if config_path is not None else RunConfig()
    spec = config.synth if seed is None else config.synth.model_copy(update={"seed": seed})
    dataset = generate_synthetic(spec)
    manifest = write_synthetic(dataset, spec, out)
    click.echo(f"wrote {len(dataset)} segments for {spec.subject_count} subjects -> {manifest}")


@main.command("gradcheck")
@click.option("--seeds", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--tolerance", type=float, default=1e-3, show_default=True)
def cmd_gradcheck(seeds: int, tolerance: float) -> None:
    """Finite-difference check of every primitive and objective."""
    results = run_all_gradchecks(seeds, tolerance)
    click.echo(render_gradchecks(results), nl=False)
    if any(r.status is CheckStatus.FAIL for r in results):
        raise click.exceptions.Exit(1)


@main.command("export-features")
@click.option("--checkpoint", type=click.Path(exists=True, path_type=Path), required=True)
@config_option
@click.option("--out", type=click.Path(path_type=Path), required=True, help="CSV destination.")
@click.option("--enc", is_flag=True, help="Include E(x).")
@click.option("--zsig", is_flag=True, help="Include activity features (default).")
@click.option("--zred", is_flag=True, help="Include redundant features.")
@_reports_errors
def cmd_export_features(
    checkpoint: Path, config_path: Path | None, out: Path, enc: bool, zsig: bool, zred: bool
) -> None:
    """Per-segment latent features for external plotting."""
    config = _config(config_path, None)
    dataset = load_dataset(config)
    ckpt = load_checkpoint(checkpoint)
    ckpt.check_dataset(dataset)
    if not isinstance(ckpt.nets, BpdNetworks):
        raise ConfigError("feature export needs a BPD checkpoint, not a baseline")
    if ckpt.channel_stats is not None:
        dataset = dataset.with_segments(ckpt.channel_stats.apply(dataset.segments))
    flags = ((FeatureField.Z_SIG, zsig), (FeatureField.Z_RED, zred), (FeatureField.ENC, enc))
    fields = [field for field, on in flags if on]
    table = export_features(ckpt.nets, dataset, out, fields or [FeatureField.Z_SIG])
    click.echo(f"wrote {len(table)} rows x {table.shape[1]} columns -> {out}")

