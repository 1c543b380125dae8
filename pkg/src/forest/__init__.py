"""Random Forest engine."""

from src.forest.forest import (
    RandomForest,
    leaf_index,
    load_forest,
    oob_error,
    predict,
    save_forest,
    train_forest,
)
from src.forest.seeding import derive_seed, draw_bootstrap
from src.forest.tree import RandomTree, grow_tree

__all__ = [
    "RandomForest",
    "RandomTree",
    "derive_seed",
    "draw_bootstrap",
    "grow_tree",
    "leaf_index",
    "load_forest",
    "oob_error",
    "predict",
    "save_forest",
    "train_forest",
]
