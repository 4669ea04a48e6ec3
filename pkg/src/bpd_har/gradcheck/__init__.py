"""Gradient check suite over every primitive and every training objective."""

from ..schemas.common import CheckStatus
from ..schemas.gradcheck import GradCheckResult
from .loss_checks import LOSS_CHECKS, run_loss_checks
from .primitive_checks import PRIMITIVE_CHECKS, run_primitive_checks

__all__ = [
    "LOSS_CHECKS",
    "PRIMITIVE_CHECKS",
    "render_gradchecks",
    "run_all_gradchecks",
    "run_loss_checks",
    "run_primitive_checks",
]


def run_all_gradchecks(seeds: int = 5, tolerance: float = 1e-3) -> list[GradCheckResult]:
    """Run primitive and loss checks on ``seeds`` random cases each.

    Results are sorted with failures first; order is otherwise stable.
    """
    results: list[GradCheckResult] = []
    results.extend(run_primitive_checks(range(seeds), tolerance))
    results.extend(run_loss_checks(range(seeds), tolerance))

    status_order = {CheckStatus.FAIL: 0, CheckStatus.PASS: 1}
    results.sort(key=lambda r: status_order[r.status])
    return results


def render_gradchecks(results: list[GradCheckResult]) -> str:
    width = max((len(r.check_name) for r in results), default=10)
    lines = [f"{'check'.ljust(width)}  status  max rel err"]
    for r in results:
        worst = "-" if not r.max_relative_error else f"{r.worst:.2e}"
        line = f"{r.check_name.ljust(width)}  {r.status.value:<6}  {worst}"
        if r.detail:
            line += f"  ({r.detail})"
        lines.append(line)
    failed = sum(r.status is CheckStatus.FAIL for r in results)
    lines.append(f"{len(results) - failed} passed, {failed} failed")
    return "\n".join(lines) + "\n"
