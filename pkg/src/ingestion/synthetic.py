"""
Synthetic multi-view datasets.

complementary_views: each view only separates part of the class structure,
so no single view can reach the accuracy of the fused model.

instance_dependent_relevance: each view is informative for its own group of
instances and pure noise for the rest, so the useful views change from one
instance to the next.
"""
from typing import Callable, Iterator, Optional

import numpy as np

from src.errors import ParameterError
from src.ingestion.base import BaseDatasetSource
from src.models.dataset import MultiViewDataset


def _balanced_labels(n: int, n_classes: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.arange(n) % n_classes).astype(np.int64)


def _ring_centres(n_classes: int, separation: float) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(n_classes) / n_classes
    return separation * np.column_stack([np.cos(angles), np.sin(angles)])


def complementary_views(
    n: int = 400,
    n_views: int = 2,
    n_classes: int = 4,
    separation: float = 3.0,
    n_noise: int = 3,
    seed: int = 0,
) -> MultiViewDataset:
    """
    Views that each resolve one bit of the class index.

    View q shifts its two informative features by `separation` when bit q
    of the class index is set, and adds `n_noise` standard normal features.

    Args:
        n: instance count
        n_views: Q
        n_classes: C, at most 2^Q
        separation: shift between the two values of a bit, in noise sds
        n_noise: uninformative features per view
        seed: RNG seed

    Raises:
        ParameterError: C > 2^Q, C < 2 or n < 2C
    """
    if n_classes < 2 or n_classes > 2 ** n_views:
        raise ParameterError(f"n_classes must lie in 2..{2 ** n_views}, got {n_classes}")
    if n < 2 * n_classes:
        raise ParameterError(f"n must be at least {2 * n_classes}, got {n}")

    rng = np.random.default_rng(seed)
    labels = _balanced_labels(n, n_classes, rng)
    views = []
    for q in range(n_views):
        bit = ((labels >> q) & 1).astype(np.float64)
        informative = rng.normal(size=(n, 2)) + separation * bit[:, None]
        noise = rng.normal(size=(n, n_noise))
        views.append(np.hstack([informative, noise]))
    return MultiViewDataset.from_arrays(
        views,
        labels,
        n_classes=n_classes,
        view_names=[f"bit{q}" for q in range(n_views)],
        name="complementary_views",
    )


def instance_dependent_relevance(
    n: int = 400,
    n_views: int = 3,
    n_classes: int = 3,
    separation: float = 4.0,
    n_noise: int = 2,
    seed: int = 0,
) -> MultiViewDataset:
    """
    Views whose relevance depends on the instance.

    Instances are split into Q equal groups. View q places the instances of
    group q around class centres on a ring; for every other instance the
    same features are drawn from a wide distribution unrelated to the class.

    Args:
        n: instance count
        n_views: Q, also the number of groups
        n_classes: C
        separation: ring radius of the class centres
        n_noise: extra uninformative features per view
        seed: RNG seed

    Raises:
        ParameterError: C < 2, Q < 2 or too few instances per group
    """
    if n_classes < 2:
        raise ParameterError(f"n_classes must be at least 2, got {n_classes}")
    if n_views < 2:
        raise ParameterError(f"n_views must be at least 2, got {n_views}")
    if n < 2 * n_classes * n_views:
        raise ParameterError(f"n must be at least {2 * n_classes * n_views}, got {n}")

    rng = np.random.default_rng(seed)
    labels = _balanced_labels(n, n_classes, rng)
    groups = rng.permutation(np.arange(n) % n_views)
    centres = _ring_centres(n_classes, separation)

    views = []
    for q in range(n_views):
        relevant = groups == q
        informative = rng.normal(scale=separation, size=(n, 2))
        informative[relevant] = centres[labels[relevant]] + rng.normal(size=(int(relevant.sum()), 2))
        noise = rng.normal(size=(n, n_noise))
        views.append(np.hstack([informative, noise]))
    return MultiViewDataset.from_arrays(
        views,
        labels,
        n_classes=n_classes,
        view_names=[f"group{q}" for q in range(n_views)],
        name="instance_dependent_relevance",
    )


GENERATORS: dict[str, Callable[..., MultiViewDataset]] = {
    "complementary_views": complementary_views,
    "instance_dependent_relevance": instance_dependent_relevance,
}


class SyntheticSource(BaseDatasetSource):
    """
    Dataset source backed by one of the generators.
    """

    def __init__(self, generator: str, seed: int = 0, **params):
        if generator not in GENERATORS:
            raise ParameterError(f"unknown generator {generator}, expected one of {sorted(GENERATORS)}")
        super().__init__(generator)
        self.generator = GENERATORS[generator]
        self.seed = seed
        self.params = params
        self._generated: Optional[MultiViewDataset] = None

    def _dataset(self) -> MultiViewDataset:
        if self._generated is None:
            self._generated = self.generator(seed=self.seed, **self.params)
        return self._generated

    def fetch_labels(self) -> np.ndarray:
        return self._dataset().labels

    def fetch_views(self) -> Iterator[tuple[str, np.ndarray]]:
        dataset = self._dataset()
        yield from zip(dataset.view_names, dataset.views)

    def n_classes(self, labels: np.ndarray) -> int:
        return self._dataset().n_classes


def generate(generator: str, seed: int = 0, **params) -> MultiViewDataset:
    """Run a generator through the dataset source pipeline."""
    return SyntheticSource(generator, seed=seed, **params).run()
