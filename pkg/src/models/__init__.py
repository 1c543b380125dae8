"""Data models module."""

from src.models.dataset import MultiViewDataset, TrainingSet
from src.models.experiment import DatasetManifest, ExperimentConfig, ViewFile
from src.models.report import (
    Comparison,
    DatasetResult,
    MethodResult,
    RunDetail,
    RunReport,
)
from src.models.selection import CandidateScore, SelectionRecord
from src.models.weights import WeightMethod, WeightVector

__all__ = [
    # Datasets
    "MultiViewDataset",
    "TrainingSet",
    # Configuration
    "DatasetManifest",
    "ExperimentConfig",
    "ViewFile",
    # Reports
    "Comparison",
    "DatasetResult",
    "MethodResult",
    "RunDetail",
    "RunReport",
    # Selection
    "CandidateScore",
    "SelectionRecord",
    # Weights
    "WeightMethod",
    "WeightVector",
]
