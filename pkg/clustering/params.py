# salient/clustering/params.py

from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ClusterConfigError(ValueError):
    """Raised when clustering parameters cannot be applied to the given tracks."""


class ClusterParams(BaseModel):
    """
    Tunables for spatial (per-frame box) and temporal (per-track label set) clustering.

    `spatial_min_size_policy` is either "seed_scaled", which derives the
    per-frame minimum cluster size from the frame's box count and the seed
    count, or "fixed", which uses `spatial_min_size` verbatim.
    """
    model_config = ConfigDict(frozen=True)

    spatial_eps: float = Field(default=0.4, gt=0.0, le=1.0)
    temporal_eps: float = Field(default=0.4, gt=0.0, le=1.0)
    temporal_min_size: int = Field(default=2, ge=1)
    spatial_min_size_policy: Literal["seed_scaled", "fixed"] = "seed_scaled"
    spatial_min_size: Optional[int] = Field(default=None, ge=1)
    spatial_metric: Literal["bbox_iou", "mask_iou"] = "bbox_iou"

    @model_validator(mode="after")
    def _check_policy(self) -> "ClusterParams":
        if self.spatial_min_size_policy == "fixed" and self.spatial_min_size is None:
            raise ValueError("spatial_min_size_policy 'fixed' needs spatial_min_size.")
        return self

    def describe(self) -> Dict[str, Any]:
        """Plain dict used for provenance blocks and run manifests."""
        return self.model_dump(mode="json")
