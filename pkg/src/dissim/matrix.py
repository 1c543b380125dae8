"""
Dissimilarity matrices and projections into a forest's dissimilarity space.

Columns are always the forest's n training instances (the reference set is
the training set). Rows are either the training set itself or new
instances.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.config.constants import MEASURE_PATH_LENGTH, MEASURE_PLAIN, MEASURE_RFD
from src.config.settings import settings
from src.dissim.hardness import HardnessTable, kdn_hardness
from src.errors import ParameterError, StructuralError
from src.forest.forest import RandomForest

logger = logging.getLogger(__name__)

# Rows per parallel block
ROW_BLOCK = 256


@dataclass(frozen=True)
class Measure:
    """Which dissimilarity a matrix holds, with its parameter."""
    kind: str
    w: Optional[float] = None
    kappa: Optional[int] = None

    @classmethod
    def plain(cls) -> "Measure":
        return cls(MEASURE_PLAIN)

    @classmethod
    def path_length(cls, w: Optional[float] = None) -> "Measure":
        w = settings.PATH_LENGTH_W if w is None else w
        if w <= 0:
            raise ParameterError(f"w must be positive, got {w}")
        return cls(MEASURE_PATH_LENGTH, w=float(w))

    @classmethod
    def rfd(cls, kappa: Optional[int] = None) -> "Measure":
        return cls(MEASURE_RFD, kappa=settings.KAPPA if kappa is None else int(kappa))

    @property
    def tag(self) -> str:
        if self.kind == MEASURE_PATH_LENGTH:
            return f"path_length({self.w:g})"
        if self.kind == MEASURE_RFD:
            return f"rfd({self.kappa})"
        return self.kind


@dataclass(frozen=True)
class DissimilarityMatrix:
    """
    An r x n matrix of dissimilarities in [0, 1].

    Attributes:
        values: (r, n) matrix
        row_ids, col_ids: instance identities
        measure: the measure the entries were computed with
    """
    values: np.ndarray
    row_ids: np.ndarray
    col_ids: np.ndarray
    measure: Measure

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def is_square(self) -> bool:
        return self.values.shape[0] == self.values.shape[1]

    def with_values(self, values: np.ndarray, measure: Optional[Measure] = None) -> "DissimilarityMatrix":
        """Same ids, new entries."""
        return DissimilarityMatrix(
            values=values,
            row_ids=self.row_ids,
            col_ids=self.col_ids,
            measure=measure or self.measure,
        )


def _plain_rows(row_leaves: np.ndarray, train_leaves: np.ndarray) -> np.ndarray:
    separated = np.zeros((row_leaves.shape[0], train_leaves.shape[0]), dtype=np.int64)
    for k in range(train_leaves.shape[1]):
        separated += row_leaves[:, k][:, None] != train_leaves[:, k][None, :]
    return separated / train_leaves.shape[1]


def _rfd_rows(row_leaves: np.ndarray, train_leaves: np.ndarray, weights: np.ndarray) -> np.ndarray:
    numerator = np.zeros((row_leaves.shape[0], train_leaves.shape[0]))
    denominator = np.zeros(train_leaves.shape[0])
    for k in range(train_leaves.shape[1]):
        separated = row_leaves[:, k][:, None] != train_leaves[:, k][None, :]
        numerator += weights[k][None, :] * separated
        denominator += weights[k]
    unweighted = denominator == 0
    denominator[unweighted] = 1.0
    values = numerator / denominator[None, :]
    # all-zero weights: fall back to the unweighted mean
    if unweighted.any():
        values[:, unweighted] = _plain_rows(row_leaves, train_leaves[unweighted])
    return values


def _path_length_rows(
    row_leaves: np.ndarray, train_leaves: np.ndarray, trees: list, w: float
) -> np.ndarray:
    proximity = np.zeros((row_leaves.shape[0], train_leaves.shape[0]))
    for k, tree in enumerate(trees):
        # edge counts only between the leaves this block actually reaches
        row_unique, row_at = np.unique(row_leaves[:, k], return_inverse=True)
        train_unique, train_at = np.unique(train_leaves[:, k], return_inverse=True)
        table = np.exp(-w * tree.path_length(row_unique[:, None], train_unique[None, :]))
        proximity += table[row_at][:, train_at]
    return 1.0 - proximity / train_leaves.shape[1]


def build_matrix(
    forest: RandomForest,
    rows: Optional[np.ndarray] = None,
    measure: Optional[Measure] = None,
    hardness: Optional[HardnessTable] = None,
    row_ids=None,
    n_jobs: Optional[int] = None,
) -> DissimilarityMatrix:
    """
    Dissimilarities between row instances and the forest's training set.

    Args:
        forest: trained forest
        rows: (t, m) instances, default the training set itself (R = T)
        measure: default the RFD measure with settings.KAPPA
        hardness: required by RFD, computed from the forest when omitted
        row_ids: identities of the rows (default: 0..t-1)
        n_jobs: joblib workers over row blocks (default: settings.N_JOBS)

    Returns:
        The (t, n) DissimilarityMatrix
    """
    measure = measure or Measure.rfd()
    training = forest.training
    if rows is None:
        row_leaves = forest.train_leaves
    else:
        X = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if X.shape[1] != training.m:
            raise StructuralError(
                f"rows have {X.shape[1]} features, the forest was trained on {training.m}"
            )
        row_leaves = forest.leaf_matrix(X)

    if measure.kind == MEASURE_RFD:
        if hardness is None:
            hardness = kdn_hardness(forest, training, measure.kappa, n_jobs=n_jobs)
        kernel, extra = _rfd_rows, (hardness.weights,)
    elif measure.kind == MEASURE_PATH_LENGTH:
        kernel, extra = _path_length_rows, (forest.trees, measure.w)
    elif measure.kind == MEASURE_PLAIN:
        kernel, extra = _plain_rows, ()
    else:
        raise ParameterError(f"unknown measure {measure.kind}")

    starts = range(0, row_leaves.shape[0], ROW_BLOCK)
    n_jobs = n_jobs or settings.N_JOBS
    if n_jobs == 1 or len(starts) == 1:
        blocks = [kernel(row_leaves[s:s + ROW_BLOCK], forest.train_leaves, *extra) for s in starts]
    else:
        blocks = Parallel(n_jobs=n_jobs)(
            delayed(kernel)(row_leaves[s:s + ROW_BLOCK], forest.train_leaves, *extra)
            for s in starts
        )
    values = np.vstack(blocks) if blocks else np.zeros((0, training.n))
    np.clip(values, 0.0, 1.0, out=values)

    ids = np.arange(values.shape[0]) if row_ids is None else np.asarray(row_ids)
    return DissimilarityMatrix(
        values=values,
        row_ids=ids,
        col_ids=np.arange(training.n),
        measure=measure,
    )


def project_batch(
    forest: RandomForest,
    hardness: Optional[HardnessTable],
    X: np.ndarray,
    measure: Optional[Measure] = None,
    n_jobs: Optional[int] = None,
) -> np.ndarray:
    """(t, n) dissimilarity representation of t instances in this forest's space."""
    return build_matrix(forest, rows=X, measure=measure, hardness=hardness, n_jobs=n_jobs).values


def project(
    forest: RandomForest,
    hardness: Optional[HardnessTable],
    x: np.ndarray,
    measure: Optional[Measure] = None,
) -> np.ndarray:
    """n-vector of dissimilarities between x and every training instance."""
    return project_batch(forest, hardness, np.asarray(x, dtype=np.float64)[None, :], measure)[0]


def matrix_to_csv(matrix: DissimilarityMatrix, path: Path) -> Path:
    """Write a matrix with row ids as index and column ids as header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(matrix.values, index=matrix.row_ids, columns=matrix.col_ids)
    frame.index.name = matrix.measure.tag
    frame.to_csv(path, float_format="%.17g")
    return path


def matrix_from_csv(path: Path, measure: Measure) -> DissimilarityMatrix:
    """Read a matrix written by matrix_to_csv."""
    frame = pd.read_csv(path, index_col=0)
    return DissimilarityMatrix(
        values=frame.to_numpy(dtype=np.float64),
        row_ids=frame.index.to_numpy(),
        col_ids=frame.columns.to_numpy(),
        measure=measure,
    )
