"""
Tests for the dissimilarity measures, hardness tables and matrices.

The oracle tests recompute every entry from leaf assignments obtained by
walking the trees node by node, independently of the vectorized code.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import hand_forest, leaf, random_training_set, stump
from src.dissim import (
    DissimilarityMatrix,
    HardnessTable,
    Measure,
    build_matrix,
    forest_dissimilarity,
    kdn,
    kdn_hardness,
    matrix_from_csv,
    matrix_to_csv,
    path_length_proximity,
    project,
    rfd,
    tree_dissimilarity,
)
import src.dissim.matrix as matrix_module
from src.dissim.hardness import standardize
from src.errors import ParameterError, StructuralError
from src.forest import train_forest
from src.forest.tree import RandomTree
from src.models.dataset import TrainingSet


# ============================================================================
# Brute-force oracle
# ============================================================================

def walk(tree, x) -> int:
    node = 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if x[tree.feature[node]] <= tree.threshold[node] else tree.right[node]
    return node


def ancestors(tree, node) -> list:
    chain = [node]
    while tree.parent[node] >= 0:
        node = tree.parent[node]
        chain.append(node)
    return chain


def edges_between(tree, a, b) -> int:
    up_a = ancestors(tree, a)
    common = next(node for node in ancestors(tree, b) if node in up_a)
    return int(tree.depth[a] + tree.depth[b] - 2 * tree.depth[common])


def oracle_kdn(X, labels, used, kappa):
    Z = standardize(X)[:, used]
    n = X.shape[0]
    values = np.zeros(n)
    for i in range(n):
        distances = [(float(np.sum((Z[i] - Z[j]) ** 2)), j) for j in range(n) if j != i]
        neighbours = [j for _, j in sorted(distances)[:kappa]]
        values[i] = np.mean([labels[j] != labels[i] for j in neighbours])
    return values


def oracle_matrices(forest, kappa, w):
    X = forest.training.features
    y = forest.training.labels
    n, M = X.shape[0], forest.n_trees
    nodes = np.array([[walk(tree, x) for tree in forest.trees] for x in X])

    hardness = np.zeros((M, n))
    for k, tree in enumerate(forest.trees):
        used = sorted({int(f) for f in tree.feature if f >= 0}) or list(range(X.shape[1]))
        hardness[k] = oracle_kdn(X, y, used, kappa)

    plain = np.zeros((n, n))
    path = np.zeros((n, n))
    weighted = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            separated = [int(nodes[i, k] != nodes[j, k]) for k in range(M)]
            plain[i, j] = sum(separated) / M
            proximity = 0.0
            for k, tree in enumerate(forest.trees):
                proximity += np.exp(-w * edges_between(tree, nodes[i, k], nodes[j, k]))
            path[i, j] = 1.0 - proximity / M
            weights = 1.0 - hardness[:, j]
            total = weights.sum()
            weighted[i, j] = np.dot(weights, separated) / total if total > 0 else plain[i, j]
    return plain, path, weighted, hardness


@pytest.mark.parametrize("case", range(50))
def test_matrices_match_brute_force_oracle(case):
    rng = np.random.default_rng(case)
    n = int(rng.integers(6, 31))
    m = int(rng.integers(1, 6))
    n_trees = int(rng.integers(1, 9))
    n_classes = int(rng.integers(2, 4))
    data = random_training_set(seed=case, n=max(n, 2 * n_classes), m=m, n_classes=n_classes)
    forest = train_forest(data, n_trees=n_trees, mtry=int(rng.integers(1, m + 1)), seed=case)
    kappa = min(3, data.n - 1)

    plain, path, weighted, hardness = oracle_matrices(forest, kappa, 0.5)
    table = kdn_hardness(forest, kappa=kappa)

    assert np.array_equal(table.values, hardness)
    assert np.array_equal(build_matrix(forest, measure=Measure.plain()).values, plain)
    assert np.allclose(build_matrix(forest, measure=Measure.path_length(0.5)).values, path, rtol=0, atol=1e-12)
    assert np.allclose(
        build_matrix(forest, measure=Measure.rfd(kappa), hardness=table).values, weighted, rtol=0, atol=1e-12
    )


# ============================================================================
# Invariants
# ============================================================================

@st.composite
def small_forests(draw):
    n_classes = draw(st.integers(2, 3))
    n = draw(st.integers(2 * n_classes + 2, 14))
    m = draw(st.integers(1, 4))
    seed = draw(st.integers(0, 2 ** 16))
    data = random_training_set(seed=seed, n=n, m=m, n_classes=n_classes)
    forest = train_forest(data, n_trees=draw(st.integers(1, 4)), mtry=draw(st.integers(1, m)), seed=seed)
    return forest


@settings(max_examples=150, deadline=None)
@given(small_forests())
def test_plain_matrix_is_symmetric_with_zero_diagonal(forest):
    D = build_matrix(forest, measure=Measure.plain()).values
    assert np.all((D >= 0) & (D <= 1))
    assert np.all(np.diag(D) == 0)
    assert np.array_equal(D, D.T)


@settings(max_examples=150, deadline=None)
@given(small_forests())
def test_rfd_matrix_is_reflexive_and_bounded(forest):
    D = build_matrix(forest, measure=Measure.rfd(2)).values
    assert np.all((D >= 0) & (D <= 1))
    assert np.all(np.diag(D) == 0)


@settings(max_examples=150, deadline=None)
@given(small_forests(), st.floats(0.05, 3.0))
def test_path_length_matrix_is_symmetric_and_bounded(forest, w):
    D = build_matrix(forest, measure=Measure.path_length(w)).values
    assert np.all((D >= 0) & (D <= 1))
    assert np.all(np.diag(D) == 0)
    assert np.allclose(D, D.T, rtol=0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(small_forests())
def test_hardness_entries_are_ratios(forest):
    table = kdn_hardness(forest, kappa=2)
    assert table.values.shape == (forest.n_trees, forest.training.n)
    assert np.all((table.values >= 0) & (table.values <= 1))


def test_rfd_is_symmetric_when_weights_are_equal(small_forest):
    table = HardnessTable(values=np.full((small_forest.n_trees, small_forest.training.n), 0.3), kappa=3)
    D = build_matrix(small_forest, measure=Measure.rfd(3), hardness=table).values
    assert np.allclose(D, D.T, rtol=0, atol=1e-12)


def test_monotone_feature_transform_keeps_plain_dissimilarities():
    data = random_training_set(seed=12, n=25, m=3)
    transformed = data.features.copy()
    transformed[:, 1] = np.exp(transformed[:, 1])
    other = TrainingSet.from_arrays(transformed, data.labels, data.n_classes)
    a = build_matrix(train_forest(data, 6, 2, seed=8), measure=Measure.plain()).values
    b = build_matrix(train_forest(other, 6, 2, seed=8), measure=Measure.plain()).values
    assert np.array_equal(a, b)


# ============================================================================
# Scalar measures
# ============================================================================

def two_point_set() -> TrainingSet:
    return TrainingSet.from_arrays([[0.0, 0.0], [1.0, 1.0]], [0, 1])


def test_tree_dissimilarity_cases():
    tree = stump(feature=0, threshold=0.5)
    assert tree_dissimilarity(tree, np.array([0.3, 0.0]), np.array([0.3, 0.0])) == 0
    assert tree_dissimilarity(tree, np.array([0.3, 0.0]), np.array([0.7, 0.0])) == 1
    assert tree_dissimilarity(leaf([1, 1]), np.array([0.0, 5.0]), np.array([9.0, -5.0])) == 0


def test_forest_dissimilarity_averages_trees():
    forest = hand_forest([stump(0, 0.5), stump(1, 0.5)], two_point_set())
    # same leaf in the first tree, different leaves in the second
    assert forest_dissimilarity(forest, np.array([0.0, 0.0]), np.array([0.2, 0.9])) == 0.5
    assert forest_dissimilarity(forest, np.array([0.4, 0.9]), np.array([0.4, 0.9])) == 0.0


def deep_tree() -> RandomTree:
    """Root on f0 at 0.5; right child splits f0 at 1.5 into two sibling leaves."""
    return RandomTree(
        feature=np.array([0, -1, 0, -1, -1]),
        threshold=np.array([0.5, np.nan, 1.5, np.nan, np.nan]),
        left=np.array([1, -1, 3, -1, -1]),
        right=np.array([2, -1, 4, -1, -1]),
        parent=np.array([-1, 0, 0, 2, 2]),
        depth=np.array([0, 1, 1, 2, 2]),
        leaf_id=np.array([-1, 0, -1, 1, 2]),
        leaf_node=np.array([1, 3, 4]),
        leaf_counts=np.array([[1, 0], [0, 1], [1, 0]]),
    )


def test_path_length_between_leaves():
    tree = deep_tree()
    assert tree.path_length(np.array(1), np.array(2)) == 2
    assert tree.path_length(np.array(0), np.array(1)) == 3
    assert tree.path_length(np.array(2), np.array(2)) == 0


def test_path_length_proximity_of_sibling_leaves():
    data = TrainingSet.from_arrays([[0.0], [1.0], [2.0]], [0, 1, 0])
    forest = hand_forest([deep_tree()], data)
    value = path_length_proximity(forest, np.array([1.0]), np.array([2.0]), 0.5)
    assert value == pytest.approx(np.exp(-1.0), abs=1e-12)
    assert path_length_proximity(forest, np.array([2.0]), np.array([1.0]), 0.5) == value
    assert path_length_proximity(forest, np.array([1.0]), np.array([1.2]), 0.5) == 1.0


def test_path_length_requires_positive_w(small_forest):
    x = small_forest.training.features[0]
    with pytest.raises(ParameterError):
        path_length_proximity(small_forest, x, x, 0.0)
    with pytest.raises(ParameterError):
        Measure.path_length(-1.0)


def test_rfd_weighted_mean():
    forest = hand_forest([stump(0, 0.5), stump(1, 0.5)], two_point_set())
    table = HardnessTable(values=np.array([[0.2, 0.0], [0.8, 0.0]]), kappa=1)
    assert rfd(forest, table, np.array([0.0, 1.0]), 0) == pytest.approx(0.2, abs=1e-12)


def test_rfd_of_training_instance_to_itself_is_zero():
    forest = hand_forest([stump(0, 0.5), stump(1, 0.5)], two_point_set())
    table = HardnessTable(values=np.array([[0.5, 0.1], [0.3, 0.9]]), kappa=1)
    assert rfd(forest, table, np.array([0.0, 0.0]), 0) == 0.0


def test_rfd_without_hardness_equals_forest_dissimilarity(small_forest):
    table = HardnessTable(values=np.zeros((small_forest.n_trees, small_forest.training.n)), kappa=3)
    X = small_forest.training.features
    for i in range(5):
        assert rfd(small_forest, table, X[10], i) == pytest.approx(
            forest_dissimilarity(small_forest, X[10], X[i]), abs=1e-12
        )


def test_rfd_falls_back_to_unweighted_mean():
    forest = hand_forest([stump(0, 0.5), stump(1, 0.5)], two_point_set())
    table = HardnessTable(values=np.array([[1.0, 0.0], [1.0, 0.0]]), kappa=1)
    assert rfd(forest, table, np.array([0.0, 1.0]), 0) == 0.5


def test_rfd_index_out_of_range(small_forest):
    table = kdn_hardness(small_forest, kappa=3)
    with pytest.raises(ParameterError):
        rfd(small_forest, table, small_forest.training.features[0], small_forest.training.n)


# ============================================================================
# kDN
# ============================================================================

def test_kdn_all_neighbours_agree():
    Z = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [50.0]])
    labels = np.array([0, 0, 0, 0, 0, 0, 1])
    assert kdn(Z, labels, 5)[0] == 0.0


def test_kdn_two_of_five_disagree():
    Z = np.array([[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [50.0]])
    labels = np.array([0, 0, 0, 0, 1, 1, 1])
    assert kdn(Z, labels, 5)[0] == pytest.approx(0.4)


def test_kdn_ties_keep_lowest_indices():
    Z = np.array([[0.0], [1.0], [-1.0]])
    labels = np.array([0, 1, 0])
    # both neighbours at distance 1, the lower index (label 1) wins
    assert kdn(Z, labels, 1)[0] == 1.0


def test_kappa_must_be_below_n(small_forest):
    with pytest.raises(ParameterError):
        kdn_hardness(small_forest, kappa=small_forest.training.n)
    with pytest.raises(ParameterError):
        kdn_hardness(small_forest, kappa=0)


def test_single_leaf_trees_use_the_full_space():
    data = random_training_set(seed=2, n=12, m=3)
    forest = hand_forest([leaf([6, 6])], data)
    table = kdn_hardness(forest, kappa=3)
    assert np.array_equal(table.values[0], kdn(standardize(data.features), data.labels, 3))


# ============================================================================
# Matrices and projections
# ============================================================================

def test_matrix_entries_match_scalar_operations():
    data = random_training_set(seed=5, n=10, m=3)
    forest = train_forest(data, n_trees=6, mtry=2, seed=1)
    table = kdn_hardness(forest, kappa=3)
    X = data.features
    plain = build_matrix(forest, measure=Measure.plain()).values
    path = build_matrix(forest, measure=Measure.path_length(0.5)).values
    weighted = build_matrix(forest, measure=Measure.rfd(3), hardness=table).values
    for i in range(data.n):
        for j in range(data.n):
            assert plain[i, j] == forest_dissimilarity(forest, X[i], X[j])
            assert path[i, j] == pytest.approx(1.0 - path_length_proximity(forest, X[i], X[j], 0.5), abs=1e-12)
            assert weighted[i, j] == pytest.approx(rfd(forest, table, X[i], j), abs=1e-12)


def test_projection_reproduces_matrix_rows(small_forest):
    table = kdn_hardness(small_forest, kappa=3)
    D = build_matrix(small_forest, measure=Measure.rfd(3), hardness=table).values
    for j in (0, 7, 19):
        row = project(small_forest, table, small_forest.training.features[j], Measure.rfd(3))
        assert row[j] == 0.0
        assert np.allclose(row, D[j], rtol=0, atol=1e-12)
        assert np.all((row >= 0) & (row <= 1))


def test_default_measure_is_rfd(small_forest):
    matrix = build_matrix(small_forest)
    assert matrix.measure.tag == f"rfd({matrix.measure.kappa})"
    assert matrix.is_square


def test_new_rows_need_matching_features(small_forest):
    with pytest.raises(StructuralError):
        build_matrix(small_forest, rows=np.zeros((2, small_forest.training.m + 1)), measure=Measure.plain())


def test_csv_export_round_trip(small_forest, tmp_path):
    matrix = build_matrix(small_forest, measure=Measure.path_length(0.5))
    path = matrix_to_csv(matrix, tmp_path / "matrix.csv")
    loaded = matrix_from_csv(path, matrix.measure)
    assert isinstance(loaded, DissimilarityMatrix)
    assert np.array_equal(loaded.values, matrix.values)
    assert list(loaded.row_ids) == list(matrix.row_ids)


def test_path_length_projection_only_measures_reached_leaves(small_forest, monkeypatch):
    expected = build_matrix(small_forest, measure=Measure.path_length(0.5)).values[3]
    original = RandomTree.path_length
    shapes = []

    def recording(tree, leaves_a, leaves_b):
        shapes.append((np.broadcast(leaves_a, leaves_b).shape, tree.n_leaves))
        return original(tree, leaves_a, leaves_b)

    monkeypatch.setattr(RandomTree, "path_length", recording)
    row = project(small_forest, None, small_forest.training.features[3], Measure.path_length(0.5))
    assert np.allclose(row, expected, rtol=0, atol=1e-12)
    assert len(shapes) == small_forest.n_trees
    for (rows, cols), n_leaves in shapes:
        assert rows == 1
        assert cols <= n_leaves


def test_rfd_matrix_falls_back_only_where_weights_vanish(small_forest, monkeypatch):
    n = small_forest.training.n
    values = np.zeros((small_forest.n_trees, n))
    values[:, 4] = 1.0
    table = HardnessTable(values=values, kappa=3)
    plain = build_matrix(small_forest, measure=Measure.plain()).values
    weighted = build_matrix(small_forest, measure=Measure.rfd(3), hardness=table).values
    assert np.allclose(weighted, plain, rtol=0, atol=1e-12)

    fallback_columns = []
    original = matrix_module._plain_rows

    def recording(row_leaves, train_leaves):
        fallback_columns.append(train_leaves.shape[0])
        return original(row_leaves, train_leaves)

    monkeypatch.setattr(matrix_module, "_plain_rows", recording)
    build_matrix(small_forest, measure=Measure.rfd(3), hardness=table, n_jobs=1)
    assert fallback_columns == [1]

    fallback_columns.clear()
    table = HardnessTable(values=np.zeros((small_forest.n_trees, n)), kappa=3)
    build_matrix(small_forest, measure=Measure.rfd(3), hardness=table, n_jobs=1)
    assert fallback_columns == []
