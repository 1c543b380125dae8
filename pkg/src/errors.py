"""
Exception hierarchy.

Every error raised on purpose by the library derives from RFDError, so the
CLI can map it to an exit code and a one-line reason.
"""
from typing import Optional


class RFDError(Exception):
    """Base class for library errors."""
    kind = "runtime"


class ParameterError(RFDError, ValueError):
    """A numeric parameter is out of its valid range."""
    kind = "parameter"


class InvalidTaskError(RFDError, ValueError):
    """The learning task itself is ill-posed (e.g. a single class)."""
    kind = "invalid_task"


class StructuralError(RFDError, ValueError):
    """Shapes, instance orders or view dimensions do not line up."""
    kind = "structural"


class DegenerateInputError(RFDError, ValueError):
    """An input has no usable signal (e.g. a zero-norm kernel matrix)."""
    kind = "degenerate_input"


class ResourceError(RFDError):
    """A request would exceed a configured resource cap."""
    kind = "resource"


class StratificationError(RFDError, ValueError):
    """A stratified split cannot place every class on both sides."""
    kind = "stratification"


class ModelFormatError(RFDError):
    """A saved forest or model has an unexpected kind or format version."""
    kind = "model_format"


class DatasetValidationError(RFDError, ValueError):
    """A dataset file does not match its manifest."""
    kind = "data_validation"

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class ExperimentError(RFDError):
    """A benchmark run failed; carries the run id and the failing stage."""
    kind = "experiment"

    def __init__(self, message: str, run: int, stage: str):
        self.run = run
        self.stage = stage
        super().__init__(f"run {run}, stage {stage}: {message}")
