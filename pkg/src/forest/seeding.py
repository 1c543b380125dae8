"""
Random streams.

One master seed feeds everything; each tree, view, candidate or run gets its
own stream derived from the master seed and its position, so results never
depend on the order in which parallel workers run.
"""
import numpy as np

from src.errors import ParameterError


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ParameterError(f"seeds must be non-negative, got {seed}")
    return seed


def derive_seed(seed: int, *keys: int) -> int:
    """
    Derive an independent 32-bit seed from a master seed and integer keys.

    derive_seed(s, a, b) is stable across runs and platforms.
    """
    entropy = [_check_seed(seed), *(int(key) for key in keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """The stream of tree k of a forest trained with this seed."""
    return np.random.default_rng([_check_seed(seed), int(tree_index)])


def draw_bootstrap(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw n instances with replacement.

    Returns:
        (n,) multiplicity of each instance in the bootstrap sample
    """
    return np.bincount(rng.integers(0, n, size=n), minlength=n)
