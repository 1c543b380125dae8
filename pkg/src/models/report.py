"""
Benchmark report models.

A RunReport is written twice: as a flat CSV (one row per dataset and
method) and as JSON carrying every seed, weight and selection transcript.
"""
from typing import Optional

from pydantic import BaseModel, Field

from src.config.constants import REPORT_SCHEMA_VERSION
from src.models.selection import SelectionRecord


class RunDetail(BaseModel):
    """What one run of one dataset used and produced."""
    run: int
    split_seed: int
    forest_seed: int
    n_train: int
    n_test: int
    fingerprint: str = Field(..., description="SHA-256 of the view forests' matrices")
    method_fingerprints: dict[str, str] = Field(
        default_factory=dict, description="Fingerprint of the view stage each method consumed"
    )
    accuracies: dict[str, float] = Field(default_factory=dict, description="Percent, per method")
    weights: dict[str, list[float]] = Field(default_factory=dict, description="Static view weights per method")
    transcript: Optional[list[SelectionRecord]] = None


class MethodResult(BaseModel):
    """Accuracy of one method on one dataset over all runs."""
    method: str
    accuracies: list[float] = Field(..., description="Percent, one per run")
    mean: float
    std: float = Field(..., description="Sample standard deviation (n-1)")
    rank: float = Field(..., description="Rank among methods on this dataset, ties share midranks")


class DatasetResult(BaseModel):
    """All methods on one dataset."""
    dataset: str
    instances: int
    views: int
    classes: int
    imbalance_ratio: float
    methods: list[MethodResult]
    runs: list[RunDetail]


class Comparison(BaseModel):
    """A method against the baseline across datasets."""
    method: str
    baseline: str
    wins: int
    ties: int
    losses: int
    threshold: int = Field(..., description="Wins needed for significance")
    significant: bool


class RunReport(BaseModel):
    """Full benchmark outcome."""
    schema_version: int = REPORT_SCHEMA_VERSION
    std_kind: str = "sample"
    methods: list[str]
    n_trees: int
    final_n_trees: int
    runs: int
    train_fraction: float
    k: int
    kappa: int
    seed: int
    alpha: float
    datasets: list[DatasetResult]
    average_ranks: dict[str, float]
    comparisons: list[Comparison] = Field(default_factory=list)
