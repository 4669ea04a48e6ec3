"""Plain-text tables: per-subject rows with an Avg. row, and class-wise F1."""

from __future__ import annotations

from collections.abc import Sequence

from ..schemas.report import MetricsReport

NA = "N/A"


def _fmt(value: float | None) -> str:
    return NA if value is None else f"{value:.4f}"


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_table(report: MetricsReport) -> str:
    return render_comparison([report])


def render_comparison(reports: Sequence[MetricsReport]) -> str:
    """One column per model over the same folds."""
    if not reports:
        raise ValueError("nothing to render")
    first = reports[0]
    keys = [first.label(row) for row in first.rows]
    for other in reports[1:]:
        if [other.label(row) for row in other.rows] != keys:
            raise ValueError("reports do not share the same folds")
    rows = [["Subject"] + [r.model.value for r in reports]]
    for i, key in enumerate(keys):
        rows.append([key] + [_fmt(r.rows[i].f1) for r in reports])
    rows.append(["Avg."] + [_fmt(r.overall) for r in reports])
    return _align(rows)


def render_classwise(reports: Sequence[MetricsReport], label_names: dict[int, str] | None = None) -> str:
    """Per-class F1 pooled over folds, one column per model."""
    if not reports:
        raise ValueError("nothing to render")
    names = label_names or reports[0].label_names
    rows = [["Class"] + [r.model.value for r in reports]]
    for k in range(len(reports[0].classwise)):
        label = k + 1
        rows.append([names.get(label, str(label))] + [_fmt(r.classwise[k]) for r in reports])
    return _align(rows)
