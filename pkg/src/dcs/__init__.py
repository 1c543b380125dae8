"""Dynamic selection over subsets of views."""

from src.dcs.pool import (
    CandidateClassifier,
    CandidatePool,
    SubsetMask,
    all_masks,
    generate_pool,
    project_candidate,
)
from src.dcs.selection import (
    DCSModel,
    competence,
    dcs_predict,
    dcs_predict_batch,
    lca_competence,
    load_dcs_model,
    region_of_competence,
    regions_of_competence,
    save_dcs_model,
    select,
    train_dcs,
    write_transcript,
)

__all__ = [
    "CandidateClassifier",
    "CandidatePool",
    "DCSModel",
    "SubsetMask",
    "all_masks",
    "competence",
    "dcs_predict",
    "dcs_predict_batch",
    "generate_pool",
    "lca_competence",
    "load_dcs_model",
    "project_candidate",
    "region_of_competence",
    "regions_of_competence",
    "save_dcs_model",
    "select",
    "train_dcs",
    "write_transcript",
]
