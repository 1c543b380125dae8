"""Multi-view learning with fused RFD matrices."""

from src.multiview.model import (
    MultiViewModel,
    ViewEnsemble,
    fit_final,
    fit_views,
    fuse,
    joint_matrix,
    load_model,
    mtry_for,
    predict,
    predict_batch,
    save_model,
    train,
)

__all__ = [
    "MultiViewModel",
    "ViewEnsemble",
    "fit_final",
    "fit_views",
    "fuse",
    "joint_matrix",
    "load_model",
    "mtry_for",
    "predict",
    "predict_batch",
    "save_model",
    "train",
]
