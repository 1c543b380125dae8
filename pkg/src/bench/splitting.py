"""
Stratified holdout splits.
"""
import logging
import math

import numpy as np

from src.errors import ParameterError, StratificationError
from src.models.dataset import MultiViewDataset

logger = logging.getLogger(__name__)


def split_indices(labels: np.ndarray, n_classes: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Per class, ceil(fraction * n_c) instances go to training, the rest to test.

    Returns:
        (train indices, test indices), each in ascending order

    Raises:
        ParameterError: fraction outside (0, 1)
        StratificationError: a class with fewer than 2 instances, or no
            instance left for testing
    """
    if not 0.0 < fraction < 1.0:
        raise ParameterError(f"fraction must lie strictly between 0 and 1, got {fraction}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)

    train, test = [], []
    for c in range(n_classes):
        members = np.flatnonzero(labels == c)
        if members.size < 2:
            raise StratificationError(
                f"class {c} has {members.size} instance(s); at least 2 are needed to stratify"
            )
        shuffled = rng.permutation(members)
        n_train = math.ceil(fraction * members.size)
        train.append(shuffled[:n_train])
        test.append(shuffled[n_train:])
    test_idx = np.concatenate(test)
    if test_idx.size == 0:
        raise StratificationError(
            f"fraction {fraction} leaves no test instances after rounding up every class"
        )
    return np.sort(np.concatenate(train)), np.sort(test_idx)


def stratified_split(
    dataset: MultiViewDataset, fraction: float, seed: int
) -> tuple[MultiViewDataset, MultiViewDataset]:
    """
    Split every view along the same stratified instance partition.

    The test side may miss a class when a class is too small to leave
    anything over after rounding up.
    """
    train_idx, test_idx = split_indices(dataset.labels, dataset.n_classes, fraction, seed)
    logger.debug(f"Split {dataset.name}: {train_idx.size} train, {test_idx.size} test")
    train = dataset.subset(train_idx, require_all_classes=True)
    test = dataset.subset(test_idx, require_all_classes=False)
    return train, test
