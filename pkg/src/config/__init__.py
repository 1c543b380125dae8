"""Config module - settings and constants."""

from src.config.settings import settings
from src.config.constants import (
    ALL_METHODS,
    MODEL_FORMAT_VERSION,
    REFERENCE_DATASETS,
)

__all__ = [
    "settings",
    "ALL_METHODS",
    "MODEL_FORMAT_VERSION",
    "REFERENCE_DATASETS",
]
