"""
Multi-view learning in the joint RFD space.

Training builds one forest and one RFD matrix per view, fuses the matrices
with view weights and trains a final forest on the fused matrix, rows as
instances and columns as features. Prediction projects a new instance in
each view's dissimilarity space, fuses the projections with the same
weights and asks the final forest.
"""
import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from src.config.constants import STREAM_FINAL, STREAM_VIEW
from src.config.settings import settings
from src.dissim.hardness import kdn_hardness
from src.dissim.matrix import DissimilarityMatrix, Measure, build_matrix, project_batch
from src.errors import ParameterError, RFDError, StructuralError
from src.forest.forest import RandomForest, oob_error, train_forest
from src.forest.seeding import derive_seed
from src.models.dataset import MultiViewDataset, TrainingSet
from src.models.weights import WeightVector
from src.persistence import load_object, save_object
from src.weighting.static import compute_weights

logger = logging.getLogger(__name__)

MODEL_KIND = "multiview_model"


def mtry_for(m: int) -> int:
    """ceil(sqrt(m))"""
    root = math.isqrt(m)
    return root if root * root == m else root + 1


def mask_key(mask: Sequence[bool]) -> int:
    """Integer of a view-subset mask, bit q set when view q is selected."""
    return sum(1 << q for q, selected in enumerate(mask) if selected)


def final_seed(seed: int, mask: Sequence[bool]) -> int:
    """Seed of the forest trained on the fusion of the masked views."""
    return derive_seed(seed, STREAM_FINAL, mask_key(mask))


def fuse(arrays: Sequence[np.ndarray], weights: np.ndarray) -> np.ndarray:
    """Entrywise sum of weights[q] * arrays[q], clipped to [0, 1]."""
    fused = np.zeros_like(arrays[0], dtype=np.float64)
    for weight, values in zip(weights, arrays):
        fused += weight * values
    return np.clip(fused, 0.0, 1.0)


def joint_matrix(matrices: Sequence[DissimilarityMatrix], weights: WeightVector) -> DissimilarityMatrix:
    """
    Weighted entrywise combination of view matrices.

    Raises:
        StructuralError: shapes, instance orders or weight count differ
    """
    if not matrices:
        raise StructuralError("at least one matrix is required")
    if len(weights) != len(matrices):
        raise StructuralError(f"{len(weights)} weights for {len(matrices)} matrices")
    first = matrices[0]
    for q, matrix in enumerate(matrices[1:], start=1):
        if matrix.shape != first.shape:
            raise StructuralError(f"matrix {q} has shape {matrix.shape}, expected {first.shape}")
        if not (np.array_equal(matrix.row_ids, first.row_ids)
                and np.array_equal(matrix.col_ids, first.col_ids)):
            raise StructuralError(f"matrix {q} does not share the instance order of matrix 0")
    values = fuse([matrix.values for matrix in matrices], weights.array)
    return first.with_values(values)


@dataclass(eq=False)
class ViewEnsemble:
    """
    The per-view stage shared by every combination method.

    Attributes:
        view_names: one name per view
        forests: H^(q)
        hardness: kDN table of each view forest
        matrices: n x n RFD matrix of each view
        labels: training labels
        n_classes: C
        seed: master seed the view seeds derive from
    """
    view_names: tuple
    forests: list
    hardness: list
    matrices: list
    labels: np.ndarray
    n_classes: int
    seed: int

    @property
    def n_views(self) -> int:
        return len(self.forests)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def dimensions(self) -> list[int]:
        return [forest.training.m for forest in self.forests]

    def check_views(self, X_views: Sequence[np.ndarray]) -> list[np.ndarray]:
        """Coerce test views to (t, m_q) arrays, naming the view on mismatch."""
        if len(X_views) != self.n_views:
            raise StructuralError(f"{len(X_views)} views given, the model has {self.n_views}")
        arrays = []
        for name, m, X in zip(self.view_names, self.dimensions, X_views):
            X = np.atleast_2d(np.asarray(X, dtype=np.float64))
            if X.shape[1] != m:
                raise StructuralError(f"view '{name}' expects {m} features, got {X.shape[1]}")
            arrays.append(X)
        if len({X.shape[0] for X in arrays}) != 1:
            raise StructuralError("all views must hold the same number of instances")
        return arrays

    def project(self, X_views: Sequence[np.ndarray], n_jobs: Optional[int] = None) -> list[np.ndarray]:
        """(t, n) RFD representation of test instances in every view."""
        arrays = self.check_views(X_views)
        return [
            project_batch(forest, table, X, Measure.rfd(table.kappa), n_jobs=n_jobs)
            for forest, table, X in zip(self.forests, self.hardness, arrays)
        ]

    def fingerprint(self) -> str:
        """SHA-256 over the view matrices, identifying this shared stage."""
        digest = hashlib.sha256()
        for matrix in self.matrices:
            digest.update(np.ascontiguousarray(matrix.values).tobytes())
        return digest.hexdigest()

    def oob_accuracies(self) -> list[Optional[float]]:
        """1 - OOB error of every view forest."""
        errors = [oob_error(forest) for forest in self.forests]
        return [None if error is None else 1.0 - error for error in errors]


def _fit_view(view: TrainingSet, name: str, n_trees: int, seed: int, kappa: int, n_jobs: int):
    try:
        forest = train_forest(view, n_trees, mtry_for(view.m), seed, n_jobs=n_jobs)
        table = kdn_hardness(forest, view, kappa, n_jobs=n_jobs)
        matrix = build_matrix(forest, measure=Measure.rfd(kappa), hardness=table, n_jobs=n_jobs)
    except RFDError as e:
        raise type(e)(f"view '{name}': {e}") from e
    return forest, table, matrix


def fit_views(
    dataset: MultiViewDataset,
    n_trees: Optional[int] = None,
    seed: int = 0,
    kappa: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> ViewEnsemble:
    """
    Train the view forests and build their RFD matrices.

    View q uses mtry = ceil(sqrt(m_q)) and the seed derived from
    (seed, q), so adding a view leaves the others untouched.
    """
    n_trees = n_trees or settings.N_TREES
    kappa = kappa if kappa is not None else settings.KAPPA
    n_jobs = n_jobs or settings.N_JOBS
    logger.info(
        f"Fitting {dataset.n_views} view forests of {n_trees} trees on n={dataset.n}"
    )

    views = []
    for q, name in enumerate(dataset.view_names):
        try:
            views.append(dataset.view(q))
        except RFDError as e:
            raise type(e)(f"view '{name}': {e}") from e

    seeds = [derive_seed(seed, STREAM_VIEW, q) for q in range(dataset.n_views)]
    if n_jobs > 1 and dataset.n_views > 1:
        # views in parallel, each view single-threaded inside
        fitted = Parallel(n_jobs=min(n_jobs, dataset.n_views))(
            delayed(_fit_view)(view, name, n_trees, view_seed, kappa, 1)
            for view, name, view_seed in zip(views, dataset.view_names, seeds)
        )
    else:
        fitted = [
            _fit_view(view, name, n_trees, view_seed, kappa, n_jobs)
            for view, name, view_seed in zip(views, dataset.view_names, seeds)
        ]

    return ViewEnsemble(
        view_names=tuple(dataset.view_names),
        forests=[forest for forest, _, _ in fitted],
        hardness=[table for _, table, _ in fitted],
        matrices=[matrix for _, _, matrix in fitted],
        labels=dataset.labels,
        n_classes=dataset.n_classes,
        seed=seed,
    )


@dataclass(eq=False)
class MultiViewModel:
    """
    A trained static-combination model.

    Attributes:
        views: the shared per-view stage
        weights: view weights
        joint: fused n x n matrix, the final forest's training features
        final_forest: H_final
    """
    views: ViewEnsemble
    weights: WeightVector
    joint: DissimilarityMatrix
    final_forest: RandomForest

    @property
    def view_forests(self) -> list:
        return self.views.forests

    @property
    def view_hardness(self) -> list:
        return self.views.hardness

    @property
    def view_matrices(self) -> list:
        return self.views.matrices

    def view_accuracies(self) -> list[Optional[float]]:
        return self.views.oob_accuracies()

    def transform(self, X_views: Sequence[np.ndarray], n_jobs: Optional[int] = None) -> np.ndarray:
        """(t, n) fused dissimilarity representation of test instances."""
        return fuse(self.views.project(X_views, n_jobs=n_jobs), self.weights.array)

    def predict_batch(self, X_views: Sequence[np.ndarray], n_jobs: Optional[int] = None) -> np.ndarray:
        return self.final_forest.predict_batch(self.transform(X_views, n_jobs=n_jobs))


def fit_final(
    views: ViewEnsemble,
    weights: Optional[WeightVector] = None,
    n_trees: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> MultiViewModel:
    """
    Fuse the view matrices and train the final forest on the joint matrix.

    The final forest uses mtry = ceil(sqrt(n)) and the seed of the
    all-views mask.
    """
    weights = weights or WeightVector.uniform(views.n_views)
    n_trees = n_trees or settings.final_n_trees
    joint = joint_matrix(views.matrices, weights)
    data = TrainingSet.from_arrays(joint.values, views.labels, views.n_classes)
    seed = final_seed(views.seed, [True] * views.n_views)
    logger.info(f"Training final forest ({weights.method.value} weights {np.round(weights.array, 4).tolist()})")
    forest = train_forest(data, n_trees, mtry_for(data.m), seed, n_jobs=n_jobs)
    return MultiViewModel(views=views, weights=weights, joint=joint, final_forest=forest)


def train(
    dataset: MultiViewDataset,
    n_trees: Optional[int] = None,
    seed: int = 0,
    weights: Union[WeightVector, str, None] = None,
    final_n_trees: Optional[int] = None,
    kappa: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> MultiViewModel:
    """
    Train the full multi-view pipeline.

    Args:
        dataset: training views and labels
        n_trees: trees per view forest (default: settings.N_TREES)
        seed: master seed
        weights: a WeightVector, a static method name (avg, sw_3nn, sw_ka,
            sw_oob), or None for uniform weights
        final_n_trees: trees of the final forest (default: n_trees)
        kappa: kDN neighbour count
        n_jobs: joblib workers

    Returns:
        The trained MultiViewModel
    """
    views = fit_views(dataset, n_trees=n_trees, seed=seed, kappa=kappa, n_jobs=n_jobs)
    if isinstance(weights, str):
        weights = compute_weights(weights, views.matrices, views.labels, views.n_classes, views.forests)
    elif weights is not None and len(weights) != views.n_views:
        raise ParameterError(f"{len(weights)} weights for {views.n_views} views")
    return fit_final(views, weights, n_trees=final_n_trees or n_trees, n_jobs=n_jobs)


def predict(model: MultiViewModel, x_views: Sequence[np.ndarray]) -> int:
    """Class of a single instance given as one feature vector per view."""
    batch = [np.asarray(x, dtype=np.float64)[None, :] for x in x_views]
    return int(model.predict_batch(batch)[0])


def predict_batch(model: MultiViewModel, X_views: Sequence[np.ndarray]) -> np.ndarray:
    return model.predict_batch(X_views)


def save_model(model: MultiViewModel, path: Path) -> Path:
    return save_object(model, path, MODEL_KIND)


def load_model(path: Path) -> MultiViewModel:
    return load_object(path, MODEL_KIND)
