"""
Instance hardness with k-Disagreeing Neighbors, per tree subspace.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist

from src.config.settings import settings
from src.errors import ParameterError
from src.forest.forest import RandomForest
from src.models.dataset import TrainingSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HardnessTable:
    """
    kDN of every training instance in every tree's feature subspace.

    Attributes:
        values: (M, n) entries in [0, 1]
        kappa: neighbour count
    """
    values: np.ndarray
    kappa: int

    @property
    def weights(self) -> np.ndarray:
        """(M, n) tree weights 1 - kDN_k(x_i)"""
        return 1.0 - self.values


def standardize(X: np.ndarray) -> np.ndarray:
    """Zero mean, unit variance per column; constant columns keep unit scale."""
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return (X - mean) / scale


def kdn(Z: np.ndarray, labels: np.ndarray, kappa: int) -> np.ndarray:
    """
    Fraction of each instance's kappa nearest neighbours with another label.

    The instance itself is excluded; ties at the kappa-th distance keep the
    lowest indices.
    """
    distances = cdist(Z, Z, metric="sqeuclidean")
    np.fill_diagonal(distances, np.inf)
    neighbours = np.argsort(distances, axis=1, kind="stable")[:, :kappa]
    return np.mean(labels[neighbours] != labels[:, None], axis=1)


def kdn_hardness(
    forest: RandomForest,
    data: Optional[TrainingSet] = None,
    kappa: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> HardnessTable:
    """
    Build the hardness table of a forest.

    Entry (k, i) is the kDN of training instance i computed with Euclidean
    distance over tree k's used features, after standardizing every feature
    on the training set. Trees with no split use the full feature space.
    Trees sharing the same feature subset share one computation.

    Args:
        forest: trained forest
        data: its training set (default: forest.training)
        kappa: neighbour count, 1 <= kappa < n (default: settings.KAPPA)
        n_jobs: joblib workers (default: settings.N_JOBS)

    Raises:
        ParameterError: kappa out of range
    """
    data = data if data is not None else forest.training
    kappa = kappa if kappa is not None else settings.KAPPA
    if not 1 <= kappa < data.n:
        raise ParameterError(f"kappa must lie in 1..{data.n - 1}, got {kappa}")

    Z = standardize(data.features)
    full_space = tuple(range(data.m))

    subspaces = []
    for tree in forest.trees:
        used = tuple(int(f) for f in tree.used_features)
        subspaces.append(used if used else full_space)
    if any(not len(tree.used_features) for tree in forest.trees):
        logger.warning("Single-leaf trees found, their kDN uses the full feature space")

    unique = sorted(set(subspaces))
    computed = Parallel(n_jobs=n_jobs or settings.N_JOBS)(
        delayed(kdn)(Z[:, list(subspace)], data.labels, kappa) for subspace in unique
    )
    by_subspace = dict(zip(unique, computed))

    values = np.vstack([by_subspace[subspace] for subspace in subspaces])
    logger.debug(
        f"kDN table: {forest.n_trees} trees, {len(unique)} distinct subspaces, kappa={kappa}"
    )
    return HardnessTable(values=values, kappa=kappa)
