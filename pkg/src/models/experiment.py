"""
Dataset manifest and experiment configuration models.

Both are small YAML files; relative paths inside them resolve against the
file's own directory.
"""
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.config.constants import ALL_METHODS
from src.config.settings import settings
from src.errors import DatasetValidationError, ParameterError

MethodName = Literal["avg", "sw_3nn", "sw_ka", "sw_oob", "dcs_rfd"]


class ViewFile(BaseModel):
    """One view: a numeric CSV, one instance per row."""
    name: str
    path: Path
    features: Optional[int] = Field(None, description="Declared column count")


class DatasetManifest(BaseModel):
    """
    Where a multi-view dataset's files live and what they should contain.
    """
    name: str
    views: list[ViewFile] = Field(..., min_length=1)
    labels: Optional[Path] = Field(None, description="One label per line; optional for prediction inputs")
    header: bool = Field(False, description="Whether CSV files start with a header row")
    instances: Optional[int] = Field(None, description="Declared n")
    n_views: Optional[int] = Field(None, description="Declared Q")
    n_classes: Optional[int] = Field(None, description="Declared C")
    classes: Optional[list[str]] = Field(
        None, description="Allowed label values, mapped to 0..C-1 in this order"
    )
    base_dir: Path = Field(default=Path("."), exclude=True)

    @field_validator("classes", mode="before")
    @classmethod
    def _classes_as_text(cls, value):
        if value is None:
            return value
        return [str(v) for v in value]

    @model_validator(mode="after")
    def _declared_view_count(self) -> "DatasetManifest":
        if self.n_views is not None and self.n_views != len(self.views):
            raise ValueError(f"declares {self.n_views} views but lists {len(self.views)}")
        if self.classes is not None and self.n_classes is not None and len(self.classes) != self.n_classes:
            raise ValueError(f"declares {self.n_classes} classes but lists {len(self.classes)}")
        return self

    def resolve(self, path: Path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    @classmethod
    def from_yaml(cls, path: Path) -> "DatasetManifest":
        """
        Parse a manifest file.

        Raises:
            DatasetValidationError: unreadable file or invalid fields
        """
        path = Path(path)
        raw = _read_yaml(path)
        try:
            return cls(**raw, base_dir=path.parent)
        except (ValidationError, TypeError) as e:
            raise DatasetValidationError(f"invalid manifest: {e}", path=str(path)) from e


class ExperimentConfig(BaseModel):
    """
    One benchmark: datasets, methods and protocol parameters.
    """
    manifests: list[Path] = Field(default_factory=list)
    methods: list[MethodName] = Field(default_factory=lambda: list(ALL_METHODS))
    n_trees: int = Field(default_factory=lambda: settings.N_TREES, ge=1)
    final_n_trees: Optional[int] = Field(None, ge=1)
    runs: int = Field(default_factory=lambda: settings.RUNS, ge=1)
    train_fraction: float = Field(default_factory=lambda: settings.TRAIN_FRACTION)
    k: int = Field(default_factory=lambda: settings.DCS_K, ge=1)
    kappa: int = Field(default_factory=lambda: settings.KAPPA, ge=1)
    seed: int = Field(default_factory=lambda: settings.MASTER_SEED, ge=0)
    include_transcripts: bool = True
    output_dir: Optional[Path] = None

    @model_validator(mode="before")
    @classmethod
    def _single_manifest(cls, data):
        if isinstance(data, dict) and "manifest" in data and "manifests" not in data:
            data = dict(data)
            data["manifests"] = [data.pop("manifest")]
        return data

    @field_validator("train_fraction")
    @classmethod
    def _open_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {value}")
        return value

    @field_validator("methods")
    @classmethod
    def _distinct_methods(cls, methods: list[str]) -> list[str]:
        if not methods:
            raise ValueError("at least one method is required")
        # canonical order, duplicates dropped
        return [m for m in ALL_METHODS if m in methods]

    @property
    def effective_final_n_trees(self) -> int:
        return self.final_n_trees or self.n_trees

    @classmethod
    def from_yaml(cls, path: Path) -> "ExperimentConfig":
        """
        Parse a config file, resolving manifest paths against its directory.

        Raises:
            ParameterError: unreadable file or invalid fields
        """
        path = Path(path)
        try:
            raw = _read_yaml(path)
        except DatasetValidationError as e:
            raise ParameterError(str(e)) from e
        try:
            config = cls(**raw)
        except (ValidationError, TypeError) as e:
            raise ParameterError(f"{path}: invalid experiment config: {e}") from e
        config.manifests = [m if m.is_absolute() else path.parent / m for m in config.manifests]
        if config.output_dir is not None and not config.output_dir.is_absolute():
            config.output_dir = path.parent / config.output_dir
        return config


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise DatasetValidationError(f"cannot read file: {e}", path=str(path)) from e
    except yaml.YAMLError as e:
        raise DatasetValidationError(f"invalid YAML: {e}", path=str(path)) from e
    if not isinstance(raw, dict):
        raise DatasetValidationError("expected a YAML mapping", path=str(path))
    return raw
