"""Static view weighting."""

from src.weighting.static import (
    compute_weights,
    ideal_kernel,
    kernel_alignment,
    loo_knn_accuracy,
    view_alignments,
    weights_3nn,
    weights_ka,
    weights_ka_linear,
    weights_oob,
)

__all__ = [
    "compute_weights",
    "ideal_kernel",
    "kernel_alignment",
    "loo_knn_accuracy",
    "view_alignments",
    "weights_3nn",
    "weights_ka",
    "weights_ka_linear",
    "weights_oob",
]
