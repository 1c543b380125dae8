"""Dataset sources: manifest CSV files and synthetic generators."""

from src.ingestion.base import BaseDatasetSource
from src.ingestion.manifest import (
    ManifestSource,
    export_dataset,
    load_dataset,
    load_instances,
)
from src.ingestion.synthetic import (
    GENERATORS,
    SyntheticSource,
    complementary_views,
    generate,
    instance_dependent_relevance,
)

__all__ = [
    "BaseDatasetSource",
    "GENERATORS",
    "ManifestSource",
    "SyntheticSource",
    "complementary_views",
    "export_dataset",
    "generate",
    "instance_dependent_relevance",
    "load_dataset",
    "load_instances",
]
