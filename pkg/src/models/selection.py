"""
Dynamic selection transcript models.
"""
from typing import Optional

from pydantic import BaseModel, Field


class CandidateScore(BaseModel):
    """How one candidate fared for one test instance."""
    mask: str = Field(..., description="0/1 string, character q for view q")
    competence: Optional[float] = Field(None, description="None when undefined")
    region: list[int] = Field(default_factory=list, description="Training indices of the region")
    prediction: int


class SelectionRecord(BaseModel):
    """
    The selection made for one test instance.

    Serialized one per line in transcript files.
    """
    instance_id: str
    chosen_mask: str
    chosen_views: list[str]
    prediction: int
    fallback: bool = False
    candidates: list[CandidateScore] = Field(default_factory=list)
