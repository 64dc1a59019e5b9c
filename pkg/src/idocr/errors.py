"""
Exception hierarchy for the ID-document OCR system.

Every error raised on purpose by the package derives from IdOcrError so the
CLI can turn it into a single machine-parseable line.
"""

from typing import List, Optional


class IdOcrError(Exception):
    """Base class for all package errors."""
    pass


class ImageError(IdOcrError):
    """Raised for invalid rasters or transforms ("empty input", "degenerate transform")."""
    pass


class GlyphUnavailableError(IdOcrError):
    """Raised when a font pool cannot render a symbol."""

    def __init__(self, font: str, symbol: str):
        self.font = font
        self.symbol = symbol
        super().__init__(f"glyph unavailable: font '{font}' has no glyph for {symbol!r}")


class FieldTextError(IdOcrError):
    """Raised for field texts that cannot be rendered."""
    pass


class ShapeMismatchError(IdOcrError):
    """Raised when an input or tensor does not have the expected shape."""
    pass


class ModelFormatError(IdOcrError):
    """Raised when a model file cannot be parsed."""
    pass


class CharsetMismatchError(IdOcrError):
    """Raised when a model and a dataset were built for different charsets."""
    pass


class DivergenceError(IdOcrError):
    """Raised when the training loss stops being finite."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"diverged at epoch {epoch}")


class InsufficientSamplesError(IdOcrError):
    """Raised when a measurement is requested on too few samples."""

    def __init__(self, requested: int, minimum: int):
        super().__init__(f"insufficient samples: {requested} < {minimum}")


class CorpusError(IdOcrError):
    """Raised for unreadable or inconsistent corpora."""
    pass


class StageFailedError(IdOcrError):
    """Raised when a bootstrap stage fails; completed stages stay on disk."""

    def __init__(self, stage: int, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"bootstrap stage {stage} failed: {cause}")


class ConfigError(IdOcrError):
    """Raised when configuration validation fails; carries every problem found."""

    def __init__(self, problems: List[str], message: Optional[str] = None):
        self.problems = list(problems)
        summary = message or f"{len(self.problems)} configuration problem(s)"
        super().__init__(f"{summary}: " + "; ".join(self.problems))
