"""Training-trajectory summaries."""

import math
from collections.abc import Sequence

from ..errors import EmptyDatasetError
from ..schemas.report import DiagnosticSummary, EpochLog


def diagnostics(logs: Sequence[EpochLog], class_count: int | None = None) -> DiagnosticSummary:
    """MINE, entropy and reconstruction trajectories with first/last comparisons."""
    if not logs:
        raise EmptyDatasetError("diagnostics need at least one epoch log")
    mine = [log.mine for log in logs]
    entropy = [log.entropy for log in logs]
    recon = [log.recon for log in logs]
    return DiagnosticSummary(
        epochs=len(logs),
        mine=mine,
        entropy=entropy,
        recon=recon,
        mine_first=mine[0],
        mine_last=mine[-1],
        entropy_first=entropy[0],
        entropy_last=entropy[-1],
        mine_decreased=mine[-1] < mine[0],
        entropy_increased=entropy[-1] > entropy[0],
        recon_improved=recon[-1] < recon[0],
        max_entropy=math.log(class_count) if class_count else None,
    )
