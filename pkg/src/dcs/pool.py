"""
Pool of candidate classifiers, one per non-empty subset of views.

Candidate S is a forest trained on the mean of the selected views' RFD
matrices. The pool is built once at fit time and reused for every test
instance.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.config.settings import settings
from src.dissim.hardness import HardnessTable, kdn_hardness
from src.dissim.matrix import DissimilarityMatrix
from src.errors import ParameterError, ResourceError
from src.forest.forest import RandomForest, train_forest
from src.models.dataset import TrainingSet
from src.models.weights import WeightVector
from src.multiview.model import final_seed, fuse, joint_matrix, mask_key, mtry_for

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsetMask:
    """Which views a candidate uses; never empty."""
    bits: tuple

    def __post_init__(self):
        if not any(self.bits):
            raise ParameterError("a view subset must select at least one view")

    @classmethod
    def from_key(cls, key: int, n_views: int) -> "SubsetMask":
        return cls(tuple(bool(key >> q & 1) for q in range(n_views)))

    @property
    def key(self) -> int:
        return mask_key(self.bits)

    @property
    def size(self) -> int:
        return sum(self.bits)

    @property
    def views(self) -> list[int]:
        return [q for q, selected in enumerate(self.bits) if selected]

    def __str__(self) -> str:
        return "".join("1" if selected else "0" for selected in self.bits)


def all_masks(n_views: int) -> Iterator[SubsetMask]:
    """The 2^Q - 1 non-empty masks in increasing key order."""
    for key in range(1, 2 ** n_views):
        yield SubsetMask.from_key(key, n_views)


def fuse_subset(arrays: Sequence[np.ndarray], mask: SubsetMask) -> np.ndarray:
    """Mean of the selected views' arrays."""
    selected = [arrays[q] for q in mask.views]
    return fuse(selected, WeightVector.uniform(mask.size).array)


@dataclass(eq=False)
class CandidateClassifier:
    """
    One pool member.

    Attributes:
        mask: the selected views
        joint: mean of the selected views' matrices (D_i)
        forest: forest trained on the rows of joint
        hardness: kDN table of that forest
    """
    mask: SubsetMask
    joint: DissimilarityMatrix
    forest: RandomForest
    hardness: HardnessTable


@dataclass(eq=False)
class CandidatePool:
    """All 2^Q - 1 candidates, ordered by mask key."""
    candidates: list
    n_views: int

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def by_key(self, key: int) -> CandidateClassifier:
        return self.candidates[key - 1]

    @property
    def full(self) -> CandidateClassifier:
        """The all-views candidate"""
        return self.candidates[-1]


def _fit_candidate(matrices, labels, n_classes, mask, n_trees, seed, kappa) -> CandidateClassifier:
    selected = [matrices[q] for q in mask.views]
    joint = joint_matrix(selected, WeightVector.uniform(mask.size))
    data = TrainingSet.from_arrays(joint.values, labels, n_classes)
    forest = train_forest(data, n_trees, mtry_for(data.m), final_seed(seed, mask.bits), n_jobs=1)
    table = kdn_hardness(forest, data, kappa, n_jobs=1)
    return CandidateClassifier(mask=mask, joint=joint, forest=forest, hardness=table)


def generate_pool(
    view_matrices: Sequence[DissimilarityMatrix],
    labels,
    n_trees: Optional[int] = None,
    seed: int = 0,
    n_classes: Optional[int] = None,
    kappa: Optional[int] = None,
    pool_cap: Optional[int] = None,
    n_jobs: Optional[int] = None,
) -> CandidatePool:
    """
    Train one candidate per non-empty subset of views.

    Args:
        view_matrices: the Q view RFD matrices
        labels: training labels
        n_trees: trees per candidate (default: settings.final_n_trees)
        seed: master seed; candidate S uses the seed derived from (seed, S)
        n_classes: C (default: max label + 1)
        kappa: kDN neighbour count of the candidates' hardness tables
        pool_cap: largest Q accepted (default: settings.POOL_CAP)
        n_jobs: joblib workers over candidates

    Raises:
        ResourceError: Q above the pool cap
    """
    n_views = len(view_matrices)
    if n_views < 1:
        raise ParameterError("at least one view matrix is required")
    cap = pool_cap if pool_cap is not None else settings.POOL_CAP
    if n_views > cap:
        raise ResourceError(
            f"{n_views} views would need {2 ** n_views - 1} candidates; the pool cap is "
            f"{cap} views, raise POOL_CAP (or pass pool_cap) to override"
        )
    y = np.asarray(labels, dtype=np.int64)
    n_classes = n_classes if n_classes is not None else int(y.max()) + 1
    n_trees = n_trees or settings.final_n_trees
    kappa = kappa if kappa is not None else settings.KAPPA

    masks = list(all_masks(n_views))
    logger.info(f"Generating a pool of {len(masks)} candidates ({n_trees} trees each)")
    candidates = Parallel(n_jobs=n_jobs or settings.N_JOBS)(
        delayed(_fit_candidate)(view_matrices, y, n_classes, mask, n_trees, seed, kappa)
        for mask in masks
    )
    return CandidatePool(candidates=list(candidates), n_views=n_views)


def project_candidate(candidate: CandidateClassifier, x_view_projections: Sequence[np.ndarray]) -> np.ndarray:
    """Mean of the selected views' projections of a test instance (or batch)."""
    return fuse_subset([np.asarray(p, dtype=np.float64) for p in x_view_projections], candidate.mask)
