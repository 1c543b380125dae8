"""
Shared fixtures for the test suite.

Usage:
    uv run pytest                 # everything but the slow benchmarks
    uv run pytest -m slow         # synthetic benchmarks only
"""
import numpy as np
import pytest

from src.forest.forest import RandomForest, train_forest
from src.forest.tree import RandomTree
from src.ingestion.synthetic import complementary_views
from src.models.dataset import MultiViewDataset, TrainingSet


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless they were selected with -m."""
    if config.getoption("-m"):
        return
    skip_slow = pytest.mark.skip(reason="slow benchmark, run with -m slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============================================================================
# Builders
# ============================================================================

def random_training_set(seed: int, n: int = 30, m: int = 4, n_classes: int = 2) -> TrainingSet:
    """Gaussian features, balanced labels, every class present."""
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % n_classes)
    features = rng.normal(size=(n, m)) + labels[:, None] * 0.8
    return TrainingSet.from_arrays(features, labels, n_classes)


def random_multiview(seed: int, n: int = 30, dims=(3, 4), n_classes: int = 2) -> MultiViewDataset:
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % n_classes)
    views = [rng.normal(size=(n, m)) + labels[:, None] * 0.8 for m in dims]
    return MultiViewDataset.from_arrays(views, labels, n_classes)


def leaf(counts) -> RandomTree:
    """A tree made of a single leaf with the given class histogram."""
    return RandomTree(
        feature=np.array([-1]),
        threshold=np.array([np.nan]),
        left=np.array([-1]),
        right=np.array([-1]),
        parent=np.array([-1]),
        depth=np.array([0]),
        leaf_id=np.array([0]),
        leaf_node=np.array([0]),
        leaf_counts=np.array([counts]),
    )


def stump(feature: int = 0, threshold: float = 0.5, left_counts=(3, 0), right_counts=(0, 2)) -> RandomTree:
    """Root split on one feature with two leaves, left numbered 0."""
    return RandomTree(
        feature=np.array([feature, -1, -1]),
        threshold=np.array([threshold, np.nan, np.nan]),
        left=np.array([1, -1, -1]),
        right=np.array([2, -1, -1]),
        parent=np.array([-1, 0, 0]),
        depth=np.array([0, 1, 1]),
        leaf_id=np.array([-1, 0, 1]),
        leaf_node=np.array([1, 2]),
        leaf_counts=np.array([left_counts, right_counts]),
    )


def hand_forest(trees, data: TrainingSet, masks=None) -> RandomForest:
    """Assemble a forest from hand-built trees."""
    masks = np.zeros((len(trees), data.n), dtype=bool) if masks is None else np.asarray(masks, dtype=bool)
    train_leaves = np.column_stack([tree.apply(data.features) for tree in trees])
    return RandomForest(
        trees=list(trees),
        bootstrap_masks=masks,
        mtry=1,
        seed=0,
        training=data,
        train_leaves=train_leaves,
    )


# ============================================================================
# Fixtures
# ============================================================================

@pytest.fixture
def separable_set() -> TrainingSet:
    """20 instances, 2 features, classes far apart on both features."""
    rng = np.random.default_rng(7)
    X0 = rng.uniform(0.0, 1.0, size=(10, 2))
    X1 = rng.uniform(3.0, 4.0, size=(10, 2))
    return TrainingSet.from_arrays(np.vstack([X0, X1]), [0] * 10 + [1] * 10)


@pytest.fixture
def small_set() -> TrainingSet:
    return random_training_set(seed=1, n=30, m=4)


@pytest.fixture
def small_forest(small_set) -> RandomForest:
    return train_forest(small_set, n_trees=8, mtry=2, seed=3)


@pytest.fixture
def two_view_dataset() -> MultiViewDataset:
    return complementary_views(n=80, seed=0)
