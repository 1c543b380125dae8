"""
Tests for Random Forest induction, prediction and OOB estimates.

Usage:
    uv run pytest test_forest.py
"""
import numpy as np
import pytest

from conftest import hand_forest, leaf, random_training_set, stump
from src.errors import InvalidTaskError, ModelFormatError, ParameterError
from src.forest import (
    RandomForest,
    leaf_index,
    load_forest,
    oob_error,
    predict,
    save_forest,
    train_forest,
)
from src.forest.seeding import derive_seed, draw_bootstrap, tree_rng
from src.models.dataset import TrainingSet
from src.persistence import save_object


# ============================================================================
# Training
# ============================================================================

def test_single_instance_is_rejected():
    with pytest.raises(ParameterError):
        TrainingSet.from_arrays([[1.0, 2.0]], [0])


def test_single_class_is_an_invalid_task():
    with pytest.raises(InvalidTaskError):
        TrainingSet.from_arrays(np.arange(10.0).reshape(5, 2), [0] * 5)


def test_missing_class_is_an_invalid_task():
    with pytest.raises(InvalidTaskError):
        TrainingSet.from_arrays(np.arange(10.0).reshape(5, 2), [0, 0, 2, 2, 0], n_classes=3)


def test_mtry_above_m_is_rejected(small_set):
    with pytest.raises(ParameterError):
        train_forest(small_set, n_trees=2, mtry=small_set.m + 1, seed=0)


def test_zero_trees_is_rejected(small_set):
    with pytest.raises(ParameterError):
        train_forest(small_set, n_trees=0, mtry=1, seed=0)


def test_separable_data_is_memorized(separable_set):
    forest = train_forest(separable_set, n_trees=8, mtry=1, seed=0)
    assert np.array_equal(forest.predict_batch(separable_set.features), separable_set.labels)


def test_same_seed_gives_identical_forests(small_set):
    a = train_forest(small_set, n_trees=6, mtry=2, seed=11)
    b = train_forest(small_set, n_trees=6, mtry=2, seed=11)
    assert np.array_equal(a.bootstrap_masks, b.bootstrap_masks)
    for ta, tb in zip(a.trees, b.trees):
        assert np.array_equal(ta.feature, tb.feature)
        assert np.array_equal(ta.threshold, tb.threshold, equal_nan=True)
    assert oob_error(a) == oob_error(b)


def test_parallel_training_matches_serial(small_set):
    serial = train_forest(small_set, n_trees=6, mtry=2, seed=5, n_jobs=1)
    parallel = train_forest(small_set, n_trees=6, mtry=2, seed=5, n_jobs=2)
    assert np.array_equal(serial.bootstrap_masks, parallel.bootstrap_masks)
    assert np.array_equal(serial.train_leaves, parallel.train_leaves)


def test_leaves_are_pure_or_unsplittable():
    data = random_training_set(seed=4, n=40, m=3, n_classes=3)
    forest = train_forest(data, n_trees=10, mtry=1, seed=2)
    for k, tree in enumerate(forest.trees):
        in_bag = np.flatnonzero(forest.bootstrap_masks[k])
        leaves = forest.train_leaves[in_bag, k]
        for leaf_id in np.unique(leaves):
            members = in_bag[leaves == leaf_id]
            labels = data.labels[members]
            if np.unique(labels).size > 1:
                rows = data.features[members]
                assert np.all(rows == rows[0])
        assert np.all(tree.leaf_counts.sum(axis=1) >= 1)


def test_each_tree_memorizes_its_bootstrap():
    data = random_training_set(seed=9, n=50, m=4)
    forest = train_forest(data, n_trees=5, mtry=2, seed=1)
    for k, tree in enumerate(forest.trees):
        in_bag = forest.bootstrap_masks[k]
        assert np.array_equal(tree.predict(data.features[in_bag]), data.labels[in_bag])


def test_tree_structure_is_a_proper_binary_tree(small_forest):
    for tree in small_forest.trees:
        internal = tree.feature >= 0
        assert np.all((tree.left >= 0) == internal)
        assert np.all((tree.right >= 0) == internal)
        assert np.all(tree.leaf_id[~internal] >= 0)
        assert np.unique(tree.leaf_id[~internal]).size == tree.n_leaves


# ============================================================================
# Leaf routing and prediction
# ============================================================================

def test_stump_threshold_semantics():
    tree = stump(feature=0, threshold=0.5)
    assert leaf_index(tree, np.array([0.3, 9.0])) == 0
    assert leaf_index(tree, np.array([0.7, -9.0])) == 1
    assert leaf_index(tree, np.array([0.5, 0.0])) == 0


def test_single_leaf_tree_routes_everything_to_it():
    tree = leaf([2, 1])
    for x in ([0.0], [1e9], [-3.5]):
        assert leaf_index(tree, np.array(x)) == 0


def test_training_instance_lands_in_a_leaf_holding_its_class(small_forest):
    data = small_forest.training
    for k, tree in enumerate(small_forest.trees):
        for i in np.flatnonzero(small_forest.bootstrap_masks[k])[:5]:
            landed = leaf_index(tree, data.features[i])
            assert tree.leaf_counts[landed, data.labels[i]] > 0


def test_single_tree_forest_predicts_leaf_majority(small_set):
    forest = train_forest(small_set, n_trees=1, mtry=2, seed=4)
    tree = forest.trees[0]
    for x in small_set.features[:10]:
        assert predict(forest, x) == tree.leaf_majority[leaf_index(tree, x)]


def test_plurality_vote():
    data = TrainingSet.from_arrays([[0.0], [1.0]], [0, 1])
    forest = hand_forest([leaf([1, 0]), leaf([0, 1]), leaf([0, 1])], data)
    assert predict(forest, np.array([0.2])) == 1


def test_vote_tie_goes_to_lowest_class():
    data = TrainingSet.from_arrays([[0.0], [1.0]], [0, 1])
    forest = hand_forest([leaf([1, 0]), leaf([0, 1])], data)
    assert predict(forest, np.array([0.2])) == 0


def test_votes_sum_to_tree_count(small_forest):
    votes = small_forest.vote_counts(small_forest.training.features)
    assert np.all(votes.sum(axis=1) == small_forest.n_trees)


# ============================================================================
# Out-of-bag
# ============================================================================

def test_oob_majority_of_votes_counts_correct():
    data = TrainingSet.from_arrays([[0.0], [1.0]], [0, 1])
    # instance 0 out of bag everywhere, trees vote (0, 0, 1)
    masks = np.array([[False, True], [False, True], [False, True]])
    forest = hand_forest([leaf([1, 0]), leaf([1, 0]), leaf([0, 1])], data, masks)
    assert oob_error(forest, [0]) == 0.0
    assert forest.oob_predictions[0] == 0


def test_oob_singleton_misclassified():
    data = TrainingSet.from_arrays([[0.0], [1.0]], [0, 1])
    masks = np.array([[False, True]])
    forest = hand_forest([leaf([0, 1])], data, masks)
    assert oob_error(forest, [0]) == 1.0


def test_oob_undefined_when_always_in_bag():
    data = TrainingSet.from_arrays([[0.0], [1.0]], [0, 1])
    masks = np.array([[True, False], [True, False]])
    forest = hand_forest([leaf([1, 0]), leaf([0, 1])], data, masks)
    assert oob_error(forest, [0]) is None
    assert oob_error(forest, []) is None
    assert forest.oob_predictions[0] == -1


def test_oob_skips_instances_without_oob_trees():
    data = TrainingSet.from_arrays([[0.0], [1.0], [2.0]], [0, 1, 1])
    masks = np.array([[True, False, False]])
    forest = hand_forest([leaf([0, 1])], data, masks)
    # instance 0 has no OOB tree; 1 and 2 are voted 1 correctly
    assert oob_error(forest) == 0.0


def test_oob_subset_out_of_range(small_forest):
    with pytest.raises(ParameterError):
        oob_error(small_forest, [small_forest.training.n])


def test_oob_fraction_is_about_one_third():
    n, M = 1000, 512
    fractions = np.array([
        np.mean(draw_bootstrap(n, tree_rng(0, k)) == 0) for k in range(M)
    ])
    assert np.mean((fractions >= 0.33) & (fractions <= 0.40)) >= 0.99


def test_bootstrap_distinct_share_concentrates():
    n = 200
    for k in range(50):
        counts = draw_bootstrap(n, tree_rng(3, k))
        assert counts.sum() == n
        assert 0.55 <= np.mean(counts > 0) <= 0.72


def test_forest_oob_fraction_matches_masks(small_forest):
    assert np.allclose(small_forest.oob_fraction(), 1.0 - small_forest.bootstrap_masks.mean(axis=1))


# ============================================================================
# Seeds and persistence
# ============================================================================

def test_derived_seeds_are_stable_and_distinct():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    with pytest.raises(ParameterError):
        derive_seed(-1, 0)


def test_save_and_load_round_trip(small_forest, tmp_path):
    path = save_forest(small_forest, tmp_path / "forest.joblib")
    loaded = load_forest(path)
    assert isinstance(loaded, RandomForest)
    assert np.array_equal(loaded.train_leaves, small_forest.train_leaves)
    X = small_forest.training.features
    assert np.array_equal(loaded.predict_batch(X), small_forest.predict_batch(X))


def test_loading_the_wrong_kind_fails(small_forest, tmp_path):
    path = save_object(small_forest, tmp_path / "other.joblib", "multiview_model")
    with pytest.raises(ModelFormatError):
        load_forest(path)
