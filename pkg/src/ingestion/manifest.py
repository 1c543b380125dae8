"""
Manifest-driven CSV dataset source.

Layout on disk: one numeric CSV per view (instances as rows), one label
file with one entry per line, and a YAML manifest listing them.
"""
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np
import pandas as pd
import yaml

from src.config.constants import REFERENCE_DATASETS
from src.errors import DatasetValidationError, RFDError
from src.ingestion.base import BaseDatasetSource
from src.models.dataset import MultiViewDataset
from src.models.experiment import DatasetManifest


def _read_table(path: Path, header: bool) -> pd.DataFrame:
    if not path.exists():
        raise DatasetValidationError("file not found", path=str(path))
    try:
        return pd.read_csv(
            path,
            header=0 if header else None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError as e:
        raise DatasetValidationError("file is empty", path=str(path)) from e
    except pd.errors.ParserError as e:
        raise DatasetValidationError(f"malformed CSV: {e}", path=str(path)) from e


def _first_line(header: bool) -> int:
    return 2 if header else 1


def parse_numeric(frame: pd.DataFrame, path: Path, header: bool) -> np.ndarray:
    """
    Convert a string table to a finite float matrix.

    Raises:
        DatasetValidationError: the first non-numeric or non-finite cell,
            with its line number
    """
    numeric = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    values = numeric.to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise DatasetValidationError(
            f"non-numeric cell {frame.iat[row, col]!r} in column {col + 1}",
            path=str(path),
            line=int(row) + _first_line(header),
        )
    return values


class ManifestSource(BaseDatasetSource):
    """
    Loads the dataset a manifest describes, checking every declared count.
    """

    def __init__(self, manifest: DatasetManifest, require_labels: bool = True):
        super().__init__(manifest.name)
        self.manifest = manifest
        self.require_labels = require_labels
        self.class_names: list[str] = []
        self._n_labels: Optional[int] = None

    def fetch_labels(self) -> Optional[np.ndarray]:
        manifest = self.manifest
        if manifest.labels is None:
            if self.require_labels:
                raise DatasetValidationError(f"manifest {manifest.name} has no labels file")
            return None

        path = manifest.resolve(manifest.labels)
        frame = _read_table(path, manifest.header)
        if frame.shape[1] != 1:
            raise DatasetValidationError(
                f"labels file must have one column, found {frame.shape[1]}", path=str(path)
            )
        raw = frame.iloc[:, 0].str.strip()
        empty = np.flatnonzero((raw == "").to_numpy())
        if empty.size:
            raise DatasetValidationError(
                "empty label", path=str(path), line=int(empty[0]) + _first_line(manifest.header)
            )

        if manifest.classes is not None:
            self.class_names = [str(c) for c in manifest.classes]
            lookup = {name: index for index, name in enumerate(self.class_names)}
            unseen = np.flatnonzero(~raw.isin(list(lookup)).to_numpy())
            if unseen.size:
                row = int(unseen[0])
                raise DatasetValidationError(
                    f"label {raw.iat[row]!r} is not one of the declared classes",
                    path=str(path),
                    line=row + _first_line(manifest.header),
                )
            labels = raw.map(lookup).to_numpy(dtype=np.int64)
        else:
            labels = self._infer_classes(raw)

        if manifest.n_classes is not None and len(self.class_names) != manifest.n_classes:
            raise DatasetValidationError(
                f"declares {manifest.n_classes} classes but the labels contain "
                f"{len(self.class_names)}",
                path=str(path),
            )
        if manifest.instances is not None and labels.shape[0] != manifest.instances:
            raise DatasetValidationError(
                f"declares {manifest.instances} instances but the labels file has {labels.shape[0]}",
                path=str(path),
            )
        self._n_labels = labels.shape[0]
        return labels

    def _infer_classes(self, raw: pd.Series) -> np.ndarray:
        """Map distinct label values to 0..C-1, numerically sorted when all are numbers."""
        numeric = pd.to_numeric(raw, errors="coerce")
        if not numeric.isna().any():
            distinct = np.unique(numeric.to_numpy())
            self.class_names = [format(v, "g") for v in distinct]
            return np.searchsorted(distinct, numeric.to_numpy()).astype(np.int64)
        distinct = sorted(raw.unique())
        self.class_names = list(distinct)
        lookup = {name: index for index, name in enumerate(distinct)}
        return raw.map(lookup).to_numpy(dtype=np.int64)

    def fetch_views(self) -> Iterator[tuple[str, np.ndarray]]:
        manifest = self.manifest
        expected_rows = self._n_labels if self._n_labels is not None else manifest.instances
        for view in manifest.views:
            path = manifest.resolve(view.path)
            array = parse_numeric(_read_table(path, manifest.header), path, manifest.header)
            if expected_rows is not None and array.shape[0] != expected_rows:
                source = "the labels file" if self._n_labels is not None else "the manifest"
                raise DatasetValidationError(
                    f"view '{view.name}' has {array.shape[0]} rows but {source} has {expected_rows}",
                    path=str(path),
                )
            if expected_rows is None:
                expected_rows = array.shape[0]
            if view.features is not None and array.shape[1] != view.features:
                raise DatasetValidationError(
                    f"view '{view.name}' declares {view.features} features but has {array.shape[1]}",
                    path=str(path),
                )
            yield view.name, array

    def n_classes(self, labels: np.ndarray) -> int:
        return len(self.class_names)

    def transform(self, views, labels) -> MultiViewDataset:
        try:
            return super().transform(views, labels)
        except DatasetValidationError:
            raise
        except RFDError as e:
            raise DatasetValidationError(f"dataset {self.name}: {e}") from e

    def check_reference(self, dataset: MultiViewDataset) -> list[str]:
        """
        Compare a catalogued dataset's counts with what was loaded.

        Returns:
            One message per mismatch (empty for unknown names)
        """
        reference = REFERENCE_DATASETS.get(self.name)
        if reference is None:
            return []
        observed = {
            "instances": dataset.n,
            "views": dataset.n_views,
            "classes": dataset.n_classes,
            "features": sum(dataset.dimensions),
        }
        problems = [
            f"{key}: catalogue {reference[key]}, loaded {value}"
            for key, value in observed.items()
            if reference[key] != value
        ]
        for problem in problems:
            self.logger.warning(f"{self.name} differs from the reference catalogue: {problem}")
        return problems


def load_dataset(manifest: Union[DatasetManifest, Path, str]) -> MultiViewDataset:
    """
    Load and validate a labelled dataset.

    Args:
        manifest: a parsed manifest or the path of its YAML file

    Raises:
        DatasetValidationError: any file, count, cell or label problem
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = DatasetManifest.from_yaml(Path(manifest))
    source = ManifestSource(manifest)
    dataset = source.run()
    source.check_reference(dataset)
    return dataset


def load_instances(manifest: Union[DatasetManifest, Path, str]) -> tuple[MultiViewDataset, bool]:
    """
    Load instances to predict; the labels file is optional.

    Returns:
        (dataset, whether labels were present)
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = DatasetManifest.from_yaml(Path(manifest))
    source = ManifestSource(manifest, require_labels=False)
    return source.run(), manifest.labels is not None


def export_dataset(dataset: MultiViewDataset, directory: Path) -> Path:
    """
    Write a dataset as view CSVs, a label file and a manifest.

    Returns:
        Path of the written manifest.yaml
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    views = []
    for view_name, array in zip(dataset.view_names, dataset.views):
        filename = f"{view_name}.csv"
        pd.DataFrame(array).to_csv(directory / filename, header=False, index=False, float_format="%.17g")
        views.append({"name": view_name, "path": filename, "features": int(array.shape[1])})
    pd.Series(dataset.labels).to_csv(directory / "labels.csv", header=False, index=False)

    manifest = {
        "name": dataset.name,
        "views": views,
        "labels": "labels.csv",
        "instances": int(dataset.n),
        "n_views": int(dataset.n_views),
        "n_classes": int(dataset.n_classes),
        "classes": [str(c) for c in range(dataset.n_classes)],
    }
    path = directory / "manifest.yaml"
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(manifest, f, sort_keys=False)
    return path
