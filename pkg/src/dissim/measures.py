"""
Scalar dissimilarity measures between two instances.

These evaluate one pair at a time; matrix.py computes whole rows of the
same quantities.
"""
import numpy as np

from src.errors import ParameterError
from src.dissim.hardness import HardnessTable
from src.forest.forest import RandomForest, leaf_index
from src.forest.tree import RandomTree


def tree_dissimilarity(tree: RandomTree, x_a: np.ndarray, x_b: np.ndarray) -> int:
    """0 if both instances land in the same leaf, else 1."""
    return int(leaf_index(tree, x_a) != leaf_index(tree, x_b))


def forest_dissimilarity(forest: RandomForest, x_a: np.ndarray, x_b: np.ndarray) -> float:
    """Share of trees separating the two instances, i.e. 1 - proximity."""
    leaves = forest.leaf_matrix(np.vstack([x_a, x_b]))
    return float(np.mean(leaves[0] != leaves[1]))


def path_length_proximity(
    forest: RandomForest, x_a: np.ndarray, x_b: np.ndarray, w: float
) -> float:
    """
    Mean over trees of exp(-w * g), g the edge count between the two leaves.

    The matching dissimilarity is 1 - proximity.
    """
    if w <= 0:
        raise ParameterError(f"w must be positive, got {w}")
    leaves = forest.leaf_matrix(np.vstack([x_a, x_b]))
    total = 0.0
    for k, tree in enumerate(forest.trees):
        g = int(tree.path_length(leaves[0, k], leaves[1, k]))
        total += np.exp(-w * g)
    return float(total / forest.n_trees)


def rfd(forest: RandomForest, hardness: HardnessTable, x: np.ndarray, i: int) -> float:
    """
    Hardness-weighted dissimilarity between x and training instance i.

    Each tree counts with weight 1 - kDN_k(x_i). When every weight is 0 the
    unweighted mean is returned.
    """
    n = forest.training.n
    if not 0 <= i < n:
        raise ParameterError(f"training index must lie in 0..{n - 1}, got {i}")
    separated = (forest.leaf_matrix(x)[0] != forest.train_leaves[i]).astype(np.float64)
    weights = hardness.weights[:, i]
    total = weights.sum()
    if total == 0:
        return float(separated.mean())
    return float(min(1.0, np.dot(weights, separated) / total))
