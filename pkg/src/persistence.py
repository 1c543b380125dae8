"""
Versioned on-disk storage for forests and trained models.

Objects are written with joblib inside an envelope recording what was saved
and with which format version.
"""
import logging
from pathlib import Path
from typing import Any

import joblib

from src.config.constants import MODEL_FORMAT_VERSION
from src.errors import ModelFormatError

logger = logging.getLogger(__name__)


def save_object(obj: Any, path: Path, kind: str) -> Path:
    """
    Save an object under a kind tag.

    Args:
        obj: forest or model
        path: destination file, parent directories are created
        kind: tag checked again on load

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    envelope = {"format_version": MODEL_FORMAT_VERSION, "kind": kind, "payload": obj}
    joblib.dump(envelope, path, compress=3)
    logger.info(f"Saved {kind} to {path}")
    return path


def load_object(path: Path, kind: str) -> Any:
    """
    Load an object saved by save_object.

    Raises:
        ModelFormatError: not an envelope, wrong kind or wrong format version
    """
    envelope = joblib.load(Path(path))
    if not isinstance(envelope, dict) or "payload" not in envelope:
        raise ModelFormatError(f"{path} is not a saved {kind}")
    if envelope.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path} has format version {envelope.get('format_version')}, "
            f"expected {MODEL_FORMAT_VERSION}"
        )
    if envelope.get("kind") != kind:
        raise ModelFormatError(f"{path} holds a {envelope.get('kind')}, expected a {kind}")
    return envelope["payload"]


def saved_kind(path: Path) -> str:
    """Kind tag of a saved object."""
    envelope = joblib.load(Path(path))
    if not isinstance(envelope, dict) or "kind" not in envelope:
        raise ModelFormatError(f"{path} is not a saved model")
    return envelope["kind"]
