"""
View weight models.
"""
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, field_validator

SUM_TOLERANCE = 1e-9


class WeightMethod(str, Enum):
    """How a weight vector was obtained."""
    UNIFORM = "uniform"
    SW_3NN = "sw_3nn"
    SW_KA = "sw_ka"
    SW_KA_LINEAR = "sw_ka_linear"
    SW_OOB = "sw_oob"
    MANUAL = "manual"


class WeightVector(BaseModel):
    """
    Q non-negative view weights summing to 1.
    """
    weights: list[float] = Field(..., min_length=1)
    method: WeightMethod = WeightMethod.MANUAL

    @field_validator("weights")
    @classmethod
    def _on_simplex(cls, weights: list[float]) -> list[float]:
        if any(not np.isfinite(w) or w < 0 for w in weights):
            raise ValueError("weights must be finite and non-negative")
        if abs(sum(weights) - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"weights must sum to 1, got {sum(weights)}")
        return weights

    @classmethod
    def from_array(cls, values, method: WeightMethod) -> "WeightVector":
        return cls(weights=[float(v) for v in np.asarray(values, dtype=np.float64)], method=method)

    @classmethod
    def uniform(cls, n_views: int) -> "WeightVector":
        return cls(weights=[1.0 / n_views] * n_views, method=WeightMethod.UNIFORM)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.weights)
