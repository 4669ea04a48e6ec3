"""Dense tensors with reverse-mode automatic differentiation."""

from . import ops
from .core import (
    ComputationRecord,
    Node,
    Tensor,
    active_record,
    backward,
    default_dtype,
    get_default_dtype,
)
from .gradcheck import grad_check

__all__ = [
    "ComputationRecord",
    "Node",
    "Tensor",
    "active_record",
    "backward",
    "default_dtype",
    "get_default_dtype",
    "grad_check",
    "ops",
]
