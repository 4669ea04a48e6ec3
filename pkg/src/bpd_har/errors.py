"""Exception hierarchy shared by every bpd_har module.

Leaf classes also derive from the builtin they refine, so callers may catch
either ``BpdError`` or the familiar ``ValueError`` / ``RuntimeError``.
"""

from collections.abc import Sequence


class BpdError(Exception):
    """Base class for all errors raised by bpd_har."""


class ShapeMismatchError(BpdError, ValueError):
    """Operand shapes are not valid for a primitive or component."""

    def __init__(self, primitive: str, detail: str) -> None:
        self.primitive = primitive
        super().__init__(f"{primitive}: {detail}")


class NumericDomainError(BpdError, ArithmeticError):
    """A primitive was evaluated outside its numeric domain (e.g. log of 0)."""


class GraphError(BpdError, RuntimeError):
    """Invalid use of a computation record (no active record, non-scalar root)."""


class ConfigError(BpdError, ValueError):
    """A run configuration or spec file failed validation."""


class ManifestError(BpdError, ValueError):
    """A dataset manifest or sensor file could not be parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class UnknownLabelError(ManifestError):
    """A sensor row carries a label code absent from the manifest label map."""


class ChannelCountMismatchError(ManifestError):
    """A sensor file does not carry the manifest's channel count."""


class EmptyDatasetError(BpdError, ValueError):
    """An operation that needs segments received none."""


class NonFiniteLossError(BpdError, ArithmeticError):
    """A training loss became NaN or infinite."""

    def __init__(self, phase: str, value: float) -> None:
        self.phase = phase
        self.value = value
        super().__init__(f"non-finite loss {value!r} in phase '{phase}'")


class CheckpointError(BpdError, ValueError):
    """A checkpoint archive is missing entries or has an unknown format."""


class ConfigMismatchError(BpdError, ValueError):
    """A dataset does not match the configuration stored with a checkpoint."""

    def __init__(self, fields: Sequence[tuple[str, object, object]]) -> None:
        self.fields = list(fields)
        diffs = ", ".join(
            f"{name} (checkpoint={expected!r}, dataset={actual!r})"
            for name, expected, actual in self.fields
        )
        super().__init__(f"dataset does not match checkpoint: {diffs}")


class FoldError(BpdError, RuntimeError):
    """Training or evaluation failed inside one protocol fold."""

    def __init__(self, test_subjects: Sequence[str], cause: BaseException) -> None:
        self.test_subjects = list(test_subjects)
        super().__init__(f"fold (test subjects {', '.join(test_subjects)}) failed: {cause}")
