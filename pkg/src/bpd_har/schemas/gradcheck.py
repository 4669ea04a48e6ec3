"""Gradient-check result records."""

from pydantic import BaseModel

from .common import CheckStatus


class GradCheckResult(BaseModel):
    """Result of comparing analytic and finite-difference gradients for one case."""

    check_name: str
    status: CheckStatus
    tolerance: float
    max_relative_error: dict[str, float] = {}
    detail: str = ""

    @property
    def worst(self) -> float:
        return max(self.max_relative_error.values(), default=float("nan"))
