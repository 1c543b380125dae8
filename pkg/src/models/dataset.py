"""
In-memory dataset models.

A TrainingSet is one feature matrix with its labels; a MultiViewDataset is Q
feature matrices over the same instances sharing one label vector.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.errors import InvalidTaskError, ParameterError, StructuralError


def _as_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1:
        raise StructuralError(f"labels must be a vector, got shape {y.shape}")
    if y.size and not np.issubdtype(y.dtype, np.integer):
        if not np.all(np.equal(np.mod(y, 1), 0)):
            raise StructuralError("labels must be integer class indices")
    return y.astype(np.int64)


def _check_labels(y: np.ndarray, n_classes: int) -> None:
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise StructuralError(f"labels must lie in 0..{n_classes - 1}")
    present = np.bincount(y, minlength=n_classes)
    missing = np.flatnonzero(present == 0)
    if missing.size:
        raise InvalidTaskError(f"classes without any instance: {missing.tolist()}")
    if n_classes < 2:
        raise InvalidTaskError("at least 2 distinct labels are required")


@dataclass(frozen=True)
class TrainingSet:
    """
    A single-view labelled sample.

    Attributes:
        features: (n, m) float64 matrix, all values finite
        labels: (n,) class indices in 0..n_classes-1
        n_classes: number of classes C, every one of them present
    """
    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    @classmethod
    def from_arrays(cls, features, labels, n_classes: Optional[int] = None) -> "TrainingSet":
        """
        Build and validate a training set.

        Raises:
            ParameterError: fewer than 2 instances
            StructuralError: shape mismatch, non-finite values, bad labels
            InvalidTaskError: a class without instances or a single class
        """
        X = np.asarray(features, dtype=np.float64)
        if X.ndim != 2:
            raise StructuralError(f"features must be a 2-d matrix, got shape {X.shape}")
        y = _as_labels(labels)
        if X.shape[0] != y.shape[0]:
            raise StructuralError(
                f"{X.shape[0]} feature rows but {y.shape[0]} labels"
            )
        if X.shape[0] < 2:
            raise ParameterError(f"at least 2 instances are required, got {X.shape[0]}")
        if X.shape[1] < 1:
            raise StructuralError("at least 1 feature is required")
        if not np.all(np.isfinite(X)):
            raise StructuralError("all feature values must be finite")
        C = int(n_classes) if n_classes is not None else int(y.max()) + 1
        _check_labels(y, C)
        return cls(features=X, labels=y, n_classes=C)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class MultiViewDataset:
    """
    Q views of the same n instances.

    Attributes:
        views: Q matrices, view q of shape (n, m_q)
        labels: (n,) class indices
        n_classes: number of classes C
        view_names: one name per view
        instance_ids: identity of each row, kept through splits
        name: dataset name
    """
    views: tuple
    labels: np.ndarray
    n_classes: int
    view_names: tuple
    instance_ids: np.ndarray = field(repr=False)
    name: str = "dataset"

    @classmethod
    def from_arrays(
        cls,
        views: Sequence,
        labels,
        n_classes: Optional[int] = None,
        view_names: Optional[Sequence[str]] = None,
        instance_ids=None,
        name: str = "dataset",
        require_all_classes: bool = True,
    ) -> "MultiViewDataset":
        """
        Build and validate a multi-view dataset.

        Args:
            views: Q feature matrices with identical row counts
            labels: n class indices
            n_classes: C; inferred as max label + 1 when omitted
            view_names: defaults to view0..viewQ-1
            instance_ids: defaults to 0..n-1
            name: dataset name carried into reports
            require_all_classes: test partitions may miss a class

        Raises:
            StructuralError: row counts differ, bad shapes or non-finite cells
            InvalidTaskError: class rules violated
        """
        if len(views) < 1:
            raise StructuralError("at least one view is required")
        y = _as_labels(labels)
        names = tuple(view_names) if view_names is not None else tuple(
            f"view{q}" for q in range(len(views))
        )
        if len(names) != len(views):
            raise StructuralError(f"{len(names)} view names for {len(views)} views")

        arrays = []
        for view_name, view in zip(names, views):
            X = np.asarray(view, dtype=np.float64)
            if X.ndim != 2:
                raise StructuralError(f"view '{view_name}' must be a 2-d matrix")
            if X.shape[0] != y.shape[0]:
                raise StructuralError(
                    f"view '{view_name}' has {X.shape[0]} rows but there are {y.shape[0]} labels"
                )
            if not np.all(np.isfinite(X)):
                raise StructuralError(f"view '{view_name}' contains non-finite values")
            arrays.append(X)

        C = int(n_classes) if n_classes is not None else int(y.max()) + 1
        if require_all_classes:
            _check_labels(y, C)
        elif y.size and (y.min() < 0 or y.max() >= C):
            raise StructuralError(f"labels must lie in 0..{C - 1}")

        ids = np.arange(y.shape[0]) if instance_ids is None else np.asarray(instance_ids)
        if ids.shape[0] != y.shape[0]:
            raise StructuralError("one instance id per row is required")

        return cls(
            views=tuple(arrays),
            labels=y,
            n_classes=C,
            view_names=names,
            instance_ids=ids,
            name=name,
        )

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def dimensions(self) -> list[int]:
        """Feature count m_q of each view"""
        return [view.shape[1] for view in self.views]

    def view(self, q: int) -> TrainingSet:
        """The single-view training set T^(q)"""
        return TrainingSet.from_arrays(self.views[q], self.labels, self.n_classes)

    def subset(self, indices, require_all_classes: bool = False) -> "MultiViewDataset":
        """The same views restricted to the given rows, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return MultiViewDataset.from_arrays(
            [view[idx] for view in self.views],
            self.labels[idx],
            n_classes=self.n_classes,
            view_names=self.view_names,
            instance_ids=self.instance_ids[idx],
            name=self.name,
            require_all_classes=require_all_classes,
        )

    def imbalance_ratio(self) -> float:
        """Majority class count over minority class count"""
        counts = np.bincount(self.labels, minlength=self.n_classes)
        counts = counts[counts > 0]
        return float(counts.max() / counts.min())
