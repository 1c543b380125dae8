"""
Static view weights: 3NN accuracy, kernel alignment and OOB accuracy.

Every function returns a WeightVector on the probability simplex.
"""
import logging
from typing import Optional, Sequence

import numpy as np
from scipy.special import softmax

from src.config.constants import METHOD_AVG, METHOD_SW_3NN, METHOD_SW_KA, METHOD_SW_OOB
from src.config.settings import settings
from src.dissim.matrix import DissimilarityMatrix
from src.errors import DegenerateInputError, ParameterError, StructuralError
from src.forest.forest import RandomForest, oob_error
from src.models.weights import WeightMethod, WeightVector

logger = logging.getLogger(__name__)


def _square_values(matrices: Sequence[DissimilarityMatrix], n: int) -> list[np.ndarray]:
    values = []
    for q, matrix in enumerate(matrices):
        D = matrix.values if isinstance(matrix, DissimilarityMatrix) else np.asarray(matrix)
        if D.shape != (n, n):
            raise StructuralError(f"matrix {q} has shape {D.shape}, expected {(n, n)}")
        values.append(D)
    return values


def _normalize(scores: np.ndarray, method: WeightMethod) -> WeightVector:
    total = scores.sum()
    if total <= 0:
        logger.warning(f"All {method.value} scores are 0, falling back to uniform weights")
        return WeightVector.uniform(scores.shape[0])
    return WeightVector.from_array(scores / total, method)


def loo_knn_accuracy(D: np.ndarray, labels: np.ndarray, k: int = 3) -> float:
    """
    Leave-one-out kNN accuracy with a dissimilarity matrix as distances.

    Distance ties keep the lowest indices, vote ties go to the lowest class.
    """
    distances = np.array(D, dtype=np.float64)
    np.fill_diagonal(distances, np.inf)
    neighbours = np.argsort(distances, axis=1, kind="stable")[:, :k]
    n_classes = int(labels.max()) + 1
    votes = np.zeros((labels.shape[0], n_classes), dtype=np.int64)
    np.add.at(votes, (np.repeat(np.arange(labels.shape[0]), k), labels[neighbours].ravel()), 1)
    return float(np.mean(np.argmax(votes, axis=1) == labels))


def weights_3nn(matrices: Sequence[DissimilarityMatrix], labels) -> WeightVector:
    """
    Weights proportional to each view's leave-one-out 3NN accuracy.

    Raises:
        ParameterError: fewer than 4 instances
    """
    y = np.asarray(labels, dtype=np.int64)
    if y.shape[0] < 4:
        raise ParameterError(f"3NN needs at least 4 instances, got {y.shape[0]}")
    accuracies = np.array([loo_knn_accuracy(D, y, 3) for D in _square_values(matrices, y.shape[0])])
    logger.debug(f"3NN accuracies per view: {np.round(accuracies, 4).tolist()}")
    return _normalize(accuracies, WeightMethod.SW_3NN)


def kernel_alignment(K1: np.ndarray, K2: np.ndarray) -> float:
    """
    Cosine of two matrices under the Frobenius inner product.

    Raises:
        StructuralError: shapes differ
        DegenerateInputError: a matrix has zero norm
    """
    K1 = np.asarray(K1, dtype=np.float64)
    K2 = np.asarray(K2, dtype=np.float64)
    if K1.shape != K2.shape:
        raise StructuralError(f"cannot align shapes {K1.shape} and {K2.shape}")
    norm1 = np.sum(K1 * K1)
    norm2 = np.sum(K2 * K2)
    if norm1 == 0 or norm2 == 0:
        raise DegenerateInputError("kernel alignment of a zero-norm matrix is undefined")
    return float(np.sum(K1 * K2) / np.sqrt(norm1 * norm2))


def ideal_kernel(labels, n_classes: int) -> np.ndarray:
    """1 for same-class pairs, -1/(C-1) otherwise (-1 when C = 2)."""
    if n_classes < 2:
        raise ParameterError(f"the ideal kernel needs C >= 2, got {n_classes}")
    y = np.asarray(labels)
    same = y[:, None] == y[None, :]
    return np.where(same, 1.0, -1.0 / (n_classes - 1))


def view_alignments(matrices: Sequence[DissimilarityMatrix], labels, n_classes: int) -> np.ndarray:
    """A(1 - D^(q), K*) for every view."""
    y = np.asarray(labels, dtype=np.int64)
    target = ideal_kernel(y, n_classes)
    return np.array([
        kernel_alignment(1.0 - D, target) for D in _square_values(matrices, y.shape[0])
    ])


def weights_ka(matrices: Sequence[DissimilarityMatrix], labels, n_classes: int) -> WeightVector:
    """Softmax of the views' kernel alignments with the ideal kernel."""
    alignments = view_alignments(matrices, labels, n_classes)
    logger.debug(f"Kernel alignments per view: {np.round(alignments, 4).tolist()}")
    return WeightVector.from_array(softmax(alignments), WeightMethod.SW_KA)


def weights_ka_linear(matrices: Sequence[DissimilarityMatrix], labels, n_classes: int) -> WeightVector:
    """
    Alignments divided by their sum (diagnostic).

    Raises:
        DegenerateInputError: some alignment is negative or they sum to <= 0
    """
    alignments = view_alignments(matrices, labels, n_classes)
    if np.any(alignments < 0) or alignments.sum() <= 0:
        raise DegenerateInputError(
            f"linear normalization needs non-negative alignments, got {alignments.tolist()}"
        )
    return WeightVector.from_array(alignments / alignments.sum(), WeightMethod.SW_KA_LINEAR)


def weights_oob(view_forests: Sequence[RandomForest], mode: Optional[str] = None) -> WeightVector:
    """
    Weights from each view forest's OOB estimate.

    Args:
        view_forests: the Q view forests
        mode: "accuracy" weighs with 1 - OOB error, "error" with the OOB
            error itself (default: settings.OOB_WEIGHT_MODE)
    """
    mode = mode or settings.OOB_WEIGHT_MODE
    if mode not in ("accuracy", "error"):
        raise ParameterError(f"unknown OOB weight mode {mode}")

    scores = []
    for q, forest in enumerate(view_forests):
        error = oob_error(forest)
        if error is None:
            logger.warning(f"View {q} has no OOB estimate, scoring it 0")
            scores.append(0.0)
            continue
        scores.append(1.0 - error if mode == "accuracy" else error)
    return _normalize(np.asarray(scores), WeightMethod.SW_OOB)


def compute_weights(
    method: str,
    matrices: Sequence[DissimilarityMatrix],
    labels,
    n_classes: int,
    view_forests: Optional[Sequence[RandomForest]] = None,
) -> WeightVector:
    """Dispatch a static combination method name to its weights."""
    if method == METHOD_AVG:
        return WeightVector.uniform(len(matrices))
    if method == METHOD_SW_3NN:
        return weights_3nn(matrices, labels)
    if method == METHOD_SW_KA:
        return weights_ka(matrices, labels, n_classes)
    if method == METHOD_SW_OOB:
        if view_forests is None:
            raise ParameterError("sw_oob needs the view forests")
        return weights_oob(view_forests)
    raise ParameterError(f"unknown static method {method}")
