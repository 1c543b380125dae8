"""
Aggregates, ranks and the sign test.
"""
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import binom, rankdata

from src.config.settings import settings
from src.errors import ParameterError


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0.0 for a single value)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ParameterError("no values to aggregate")
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), std


def rank_methods(means: Mapping[str, float]) -> dict[str, float]:
    """
    Rank methods by accuracy, 1 for the best; tied methods share midranks.
    """
    names = list(means)
    ranks = rankdata([-means[name] for name in names], method="average")
    return {name: float(rank) for name, rank in zip(names, ranks)}


def average_ranks(per_dataset: Sequence[Mapping[str, float]]) -> dict[str, float]:
    """Mean rank of each method over datasets."""
    if not per_dataset:
        return {}
    names = list(per_dataset[0])
    return {name: float(np.mean([ranks[name] for ranks in per_dataset])) for name in names}


def compare(method: Sequence[float], baseline: Sequence[float], decimals: int = 4) -> tuple[int, int, int]:
    """
    Wins, ties and losses of a method against a baseline over datasets.

    Accuracies are compared at the reported precision.
    """
    a = np.round(np.asarray(method, dtype=np.float64), decimals)
    b = np.round(np.asarray(baseline, dtype=np.float64), decimals)
    return int(np.sum(a > b)), int(np.sum(a == b)), int(np.sum(a < b))


def sign_threshold(n: int, alpha: float) -> int:
    """
    Smallest w whose one-sided binomial(n, 0.5) tail P(X >= w) is <= alpha.

    Returns n + 1 when no number of wins out of n is significant.
    """
    if n < 1:
        raise ParameterError(f"the sign test needs at least one comparison, got {n}")
    w = np.arange(n + 2)
    tails = binom.sf(w - 1, n, 0.5)
    return int(np.flatnonzero(tails <= alpha)[0])


@dataclass(frozen=True)
class SignTestResult:
    significant: bool
    threshold: int
    wins: int
    n: int


def sign_test(wins: int, ties: int, losses: int, alpha: Optional[float] = None) -> SignTestResult:
    """
    One-sided sign test of wins against losses.

    Ties count half to each side; with an odd number of ties the extra one
    goes to the losses.

    Raises:
        ParameterError: negative counts or no comparison at all
    """
    alpha = settings.SIGN_TEST_ALPHA if alpha is None else alpha
    if min(wins, ties, losses) < 0:
        raise ParameterError("counts must be non-negative")
    n = wins + ties + losses
    effective_wins = wins + ties // 2
    threshold = sign_threshold(n, alpha)
    return SignTestResult(
        significant=effective_wins >= threshold,
        threshold=threshold,
        wins=effective_wins,
        n=n,
    )
