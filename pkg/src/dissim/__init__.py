"""Random Forest dissimilarity measures and matrices."""

from src.dissim.hardness import HardnessTable, kdn, kdn_hardness, standardize
from src.dissim.matrix import (
    DissimilarityMatrix,
    Measure,
    build_matrix,
    matrix_from_csv,
    matrix_to_csv,
    project,
    project_batch,
)
from src.dissim.measures import (
    forest_dissimilarity,
    path_length_proximity,
    rfd,
    tree_dissimilarity,
)

__all__ = [
    "DissimilarityMatrix",
    "HardnessTable",
    "Measure",
    "build_matrix",
    "forest_dissimilarity",
    "kdn",
    "kdn_hardness",
    "matrix_from_csv",
    "matrix_to_csv",
    "path_length_proximity",
    "project",
    "project_batch",
    "rfd",
    "standardize",
    "tree_dissimilarity",
]
