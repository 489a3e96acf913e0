# salient/scenegraph/fitness.py

import math
from typing import List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ObservationError(ValueError):
    """Raised for observations that cannot be scored or integrated."""


class FitnessParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1000.0, gt=0)
    seg_threshold: float = Field(default=0.3, gt=0)
    pix_threshold: float = Field(default=10.0, gt=0)
    sighting_weight: float = Field(default=0.02, gt=0)
    association_overlap_threshold: float = Field(default=0.5, gt=0, le=1)
    nn_radius: float = Field(default=0.02, gt=0)


class Observation(BaseModel):
    """One segmented sighting: a label, its segmentation score and a world-frame point cloud (meters)."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    timestamp: float = Field(alias="t")
    label: str
    seg_score: float = Field(ge=0.0, le=1.0)
    points: List[Tuple[float, float, float]]
    pose: Optional[Tuple[float, float, float, float, float, float]] = None


class FrameFit(NamedTuple):
    accept: bool
    reason: Optional[str] = None  # "seg" or "pix" when rejected


def pixel_confidence(obs: Observation, p: FitnessParams) -> float:
    """Segmentation score divided by the square root of the point count, scaled by alpha."""
    if not obs.points:
        raise ObservationError(f"Observation of '{obs.label}' at t={obs.timestamp} has no points.")
    return obs.seg_score * p.alpha / math.sqrt(len(obs.points))


def frame_fit(obs: Observation, p: FitnessParams) -> FrameFit:
    """Inclusive thresholds on the segmentation score, then on pixel confidence. An empty cloud fails on pix."""
    if obs.seg_score < p.seg_threshold:
        return FrameFit(False, "seg")
    if not obs.points or pixel_confidence(obs, p) < p.pix_threshold:
        return FrameFit(False, "pix")
    return FrameFit(True)


def object_score(node, p: FitnessParams) -> float:
    """Best segmentation score plus a bonus per repeat sighting, for anything carrying `seg_score` and `sightings`."""
    return node.seg_score + p.sighting_weight * (node.sightings - 1)
