"""
Breiman Random Forest: induction, majority-vote prediction, leaf assignment
and Out-Of-Bag estimates.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.config.settings import settings
from src.errors import InvalidTaskError, ParameterError
from src.forest.seeding import draw_bootstrap, tree_rng
from src.forest.tree import RandomTree, grow_tree
from src.models.dataset import TrainingSet
from src.persistence import load_object, save_object

logger = logging.getLogger(__name__)

FOREST_KIND = "random_forest"


@dataclass(eq=False)
class RandomForest:
    """
    M fully grown trees with their bootstrap masks.

    Immutable after train_forest returns; safe to share between readers.

    Attributes:
        trees: the M trees
        bootstrap_masks: (M, n) True where the instance was drawn for that tree
        mtry: features sampled per node
        seed: master seed the trees' streams derive from
        training: the training set
    """
    trees: list
    bootstrap_masks: np.ndarray
    mtry: int
    seed: int
    training: TrainingSet
    train_leaves: np.ndarray = field(repr=False)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def n_classes(self) -> int:
        return self.training.n_classes

    def leaf_matrix(self, X: np.ndarray) -> np.ndarray:
        """(t, M) leaf id of each row of X in each tree."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        leaves = np.empty((X.shape[0], self.n_trees), dtype=np.int64)
        for k, tree in enumerate(self.trees):
            leaves[:, k] = tree.apply(X)
        return leaves

    def vote_counts(self, X: np.ndarray) -> np.ndarray:
        """(t, C) number of trees voting for each class."""
        leaves = self.leaf_matrix(X)
        votes = np.zeros((leaves.shape[0], self.n_classes), dtype=np.int64)
        rows = np.arange(leaves.shape[0])
        for k, tree in enumerate(self.trees):
            np.add.at(votes, (rows, tree.leaf_majority[leaves[:, k]]), 1)
        return votes

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        """Plurality class of each row, ties to the lowest class index."""
        return np.argmax(self.vote_counts(X), axis=1)

    @cached_property
    def oob_votes(self) -> np.ndarray:
        """(n, C) votes of each training instance's OOB trees."""
        n = self.training.n
        votes = np.zeros((n, self.n_classes), dtype=np.int64)
        rows = np.arange(n)
        for k, tree in enumerate(self.trees):
            oob = ~self.bootstrap_masks[k]
            predicted = tree.leaf_majority[self.train_leaves[:, k]]
            np.add.at(votes, (rows[oob], predicted[oob]), 1)
        return votes

    @cached_property
    def oob_predictions(self) -> np.ndarray:
        """(n,) OOB majority class per training instance, -1 without OOB trees."""
        votes = self.oob_votes
        predictions = np.argmax(votes, axis=1)
        predictions[votes.sum(axis=1) == 0] = -1
        return predictions

    def oob_fraction(self) -> np.ndarray:
        """(M,) share of training instances left out of each tree's bootstrap."""
        return 1.0 - self.bootstrap_masks.mean(axis=1)


def _fit_tree(X, y, n_classes, mtry, seed, k) -> tuple[RandomTree, np.ndarray]:
    rng = tree_rng(seed, k)
    counts = draw_bootstrap(X.shape[0], rng)
    tree = grow_tree(X, y, n_classes, counts, mtry, rng)
    return tree, counts > 0


def train_forest(
    data: TrainingSet,
    n_trees: int,
    mtry: int,
    seed: int,
    n_jobs: Optional[int] = None,
) -> RandomForest:
    """
    Train a Random Forest.

    Tree k draws its bootstrap and its feature samples from the stream
    (seed, k), so the forest is the same whatever n_jobs is.

    Args:
        data: the training set
        n_trees: M >= 1
        mtry: 1 <= mtry <= m
        seed: master seed
        n_jobs: joblib workers (default: settings.N_JOBS)

    Returns:
        The trained forest

    Raises:
        ParameterError: bad M, mtry or seed
        InvalidTaskError: fewer than 2 distinct labels
    """
    if n_trees < 1:
        raise ParameterError(f"a forest needs at least 1 tree, got {n_trees}")
    if not 1 <= mtry <= data.m:
        raise ParameterError(f"mtry must lie in 1..{data.m}, got {mtry}")
    if seed < 0:
        raise ParameterError(f"seeds must be non-negative, got {seed}")
    if np.unique(data.labels).size < 2:
        raise InvalidTaskError("at least 2 distinct labels are required")

    n_jobs = n_jobs or settings.N_JOBS
    logger.debug(f"Training {n_trees} trees on n={data.n}, m={data.m}, mtry={mtry}")

    fitted = Parallel(n_jobs=n_jobs)(
        delayed(_fit_tree)(data.features, data.labels, data.n_classes, mtry, seed, k)
        for k in range(n_trees)
    )
    trees = [tree for tree, _ in fitted]
    masks = np.vstack([mask for _, mask in fitted])

    train_leaves = np.empty((data.n, n_trees), dtype=np.int64)
    for k, tree in enumerate(trees):
        train_leaves[:, k] = tree.apply(data.features)

    return RandomForest(
        trees=trees,
        bootstrap_masks=masks,
        mtry=mtry,
        seed=seed,
        training=data,
        train_leaves=train_leaves,
    )


def leaf_index(tree: RandomTree, x: np.ndarray) -> int:
    """Leaf of the tree where x lands."""
    return int(tree.apply(np.asarray(x, dtype=np.float64)[None, :])[0])


def predict(forest: RandomForest, x: np.ndarray) -> int:
    """Majority vote of the forest for a single instance."""
    return int(forest.predict_batch(np.asarray(x, dtype=np.float64)[None, :])[0])


def oob_error(forest: RandomForest, subset: Optional[Sequence[int]] = None) -> Optional[float]:
    """
    OOB error rate, optionally restricted to some training instances.

    Instances without any OOB tree are skipped and leave the denominator.

    Returns:
        error rate in [0, 1], or None when no requested instance has an OOB
        tree (undefined competence)
    """
    n = forest.training.n
    idx = np.arange(n) if subset is None else np.asarray(subset, dtype=np.int64)
    if idx.size == 0:
        return None
    if idx.min() < 0 or idx.max() >= n:
        raise ParameterError(f"subset indices must lie in 0..{n - 1}")

    predicted = forest.oob_predictions[idx]
    estimable = predicted >= 0
    if not estimable.any():
        return None
    wrong = predicted[estimable] != forest.training.labels[idx][estimable]
    return float(wrong.mean())


def save_forest(forest: RandomForest, path: Path) -> Path:
    return save_object(forest, path, FOREST_KIND)


def load_forest(path: Path) -> RandomForest:
    return load_object(path, FOREST_KIND)
