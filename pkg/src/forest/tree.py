"""
Fully grown random trees.

A tree is stored as flat node arrays so that routing a batch of instances is
a handful of vectorized steps per depth level. Leaves are numbered
0..L-1 in left-first depth-first order.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Gains at or below this are treated as "no impurity decrease"
GAIN_TOL = 1e-12


@dataclass(frozen=True)
class RandomTree:
    """
    A binary classification tree.

    Attributes:
        feature: (N,) split feature per node, -1 for leaves
        threshold: (N,) split threshold, instances go left iff x[f] <= t
        left, right: (N,) child node indices, -1 for leaves
        parent: (N,) parent node index, -1 for the root
        depth: (N,) edges from the root
        leaf_id: (N,) leaf number, -1 for internal nodes
        leaf_node: (L,) node index of each leaf
        leaf_counts: (L, C) in-bag class histogram of each leaf
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    leaf_id: np.ndarray
    leaf_node: np.ndarray
    leaf_counts: np.ndarray

    root = 0

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return self.leaf_node.shape[0]

    @property
    def used_features(self) -> np.ndarray:
        """Sorted indices of the features appearing in internal nodes"""
        return np.unique(self.feature[self.feature >= 0])

    @property
    def leaf_majority(self) -> np.ndarray:
        """(L,) majority class per leaf, ties to the lowest class index"""
        return np.argmax(self.leaf_counts, axis=1)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf id reached by each row of X."""
        X = np.atleast_2d(X)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active[rows] = self.feature[node[rows]] >= 0
        return self.leaf_id[node]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.leaf_majority[self.apply(X)]

    def path_length(self, leaves_a: np.ndarray, leaves_b: np.ndarray) -> np.ndarray:
        """
        Number of edges between pairs of leaves (0 for identical leaves).

        Args:
            leaves_a, leaves_b: broadcastable arrays of leaf ids

        Returns:
            array of edge counts with the broadcast shape
        """
        a, b = np.broadcast_arrays(
            self.leaf_node[np.asarray(leaves_a)], self.leaf_node[np.asarray(leaves_b)]
        )
        a = a.copy()
        b = b.copy()
        edges = np.zeros(a.shape, dtype=np.int64)
        differ = a != b
        while differ.any():
            depth_a = self.depth[a]
            depth_b = self.depth[b]
            up_a = differ & (depth_a >= depth_b)
            up_b = differ & (depth_b >= depth_a)
            a[up_a] = self.parent[a[up_a]]
            b[up_b] = self.parent[b[up_b]]
            edges += up_a.astype(np.int64) + up_b.astype(np.int64)
            differ = a != b
        return edges


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    n_classes: int,
    features,
) -> Optional[tuple[float, int, float]]:
    """
    Best Gini split over the given features.

    Candidate thresholds are midpoints between consecutive distinct values.
    Ties go to the lowest feature index, then the smallest threshold.

    Returns:
        (gain, feature, threshold), or None when no feature separates the node
    """
    total = np.bincount(y, weights=w, minlength=n_classes)
    weight = total.sum()
    parent_gini = 1.0 - np.sum((total / weight) ** 2)

    best = None
    for f in sorted(int(f) for f in features):
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        boundaries = np.flatnonzero(xs[:-1] < xs[1:])
        if boundaries.size == 0:
            continue

        onehot = np.zeros((xs.shape[0], n_classes))
        onehot[np.arange(xs.shape[0]), y[order]] = w[order]
        left = np.cumsum(onehot, axis=0)[boundaries]
        right = total - left
        w_left = left.sum(axis=1)
        w_right = right.sum(axis=1)
        gini_left = 1.0 - np.sum((left / w_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right / w_right[:, None]) ** 2, axis=1)
        gain = parent_gini - (w_left * gini_left + w_right * gini_right) / weight

        j = int(np.argmax(gain))
        if best is None or gain[j] > best[0]:
            lo, hi = xs[boundaries[j]], xs[boundaries[j] + 1]
            threshold = (lo + hi) / 2.0
            if threshold >= hi:
                threshold = lo
            best = (float(gain[j]), f, float(threshold))
    return best


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    counts: np.ndarray,
    mtry: int,
    rng: np.random.Generator,
) -> RandomTree:
    """
    Grow a tree to maximum depth on a bootstrap sample.

    At each node mtry features are drawn uniformly without replacement. If
    none of them decreases the Gini impurity, all m features are searched
    once; if that fails too but some feature still separates the node, the
    best separating split is kept so that every leaf ends up pure or made of
    identical instances.

    Args:
        X: (n, m) training features
        y: (n,) labels
        n_classes: C
        counts: (n,) bootstrap multiplicities, 0 for out-of-bag instances
        mtry: features sampled per node
        rng: this tree's stream

    Returns:
        The grown RandomTree
    """
    m = X.shape[1]
    in_bag = np.flatnonzero(counts)

    feature, threshold, left, right, parent, depth, leaf_id = [], [], [], [], [], [], []
    leaf_node, leaf_counts = [], []

    def new_node(parent_index: int, node_depth: int) -> int:
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        parent.append(parent_index)
        depth.append(node_depth)
        leaf_id.append(-1)
        return len(feature) - 1

    stack = [(new_node(-1, 0), in_bag)]
    while stack:
        node, idx = stack.pop()
        Xn, yn, wn = X[idx], y[idx], counts[idx].astype(np.float64)
        histogram = np.bincount(yn, weights=wn, minlength=n_classes)

        split = None
        if np.count_nonzero(histogram) > 1:
            sampled = rng.choice(m, size=mtry, replace=False)
            split = _best_split(Xn, yn, wn, n_classes, sampled)
            if split is None or split[0] <= GAIN_TOL:
                split = _best_split(Xn, yn, wn, n_classes, range(m))

        if split is None:
            leaf_id[node] = len(leaf_node)
            leaf_node.append(node)
            leaf_counts.append(np.rint(histogram).astype(np.int64))
            continue

        _, f, t = split
        goes_left = Xn[:, f] <= t
        feature[node] = f
        threshold[node] = t
        left_child = new_node(node, depth[node] + 1)
        right_child = new_node(node, depth[node] + 1)
        left[node] = left_child
        right[node] = right_child
        # right pushed first so the left subtree is numbered first
        stack.append((right_child, idx[~goes_left]))
        stack.append((left_child, idx[goes_left]))

    return RandomTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        parent=np.asarray(parent, dtype=np.int64),
        depth=np.asarray(depth, dtype=np.int64),
        leaf_id=np.asarray(leaf_id, dtype=np.int64),
        leaf_node=np.asarray(leaf_node, dtype=np.int64),
        leaf_counts=np.asarray(leaf_counts, dtype=np.int64).reshape(-1, n_classes),
    )
