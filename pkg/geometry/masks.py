# salient/geometry/masks.py

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .boxes import BBox

logger = logging.getLogger(__name__)


class MaskShapeError(ValueError):
    """Raised when masks of different sizes are combined."""


class BitMask(BaseModel):
    """
    Binary pixel grid stored as canonical run-length encoding.

    `runs` is row-major and alternates (skip, run) counts starting with a skip.
    Every run is positive, every skip after the first is positive and there is
    no trailing skip, so each pixel set has exactly one encoding.
    """
    model_config = ConfigDict(frozen=True)

    width: int = Field(ge=0)
    height: int = Field(ge=0)
    runs: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_runs(self) -> "BitMask":
        runs = self.runs
        if len(runs) % 2:
            raise ValueError(f"RLE must hold (skip, run) pairs; got {len(runs)} counts.")
        for i, count in enumerate(runs):
            if count < 0 or (count == 0 and i > 0):
                raise ValueError(f"RLE count #{i} = {count} breaks the canonical form.")
        if sum(runs) > self.width * self.height:
            raise ValueError(f"RLE covers {sum(runs)} pixels but the mask has {self.width * self.height}.")
        return self

    # --- Construction ---

    @classmethod
    def empty(cls, width: int, height: int) -> "BitMask":
        return cls(width=width, height=height)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitMask":
        """Encode a 2D (height, width) array; nonzero pixels are set."""
        grid = np.asarray(array).astype(bool)
        if grid.ndim != 2:
            raise MaskShapeError(f"Expected a 2D mask array, got shape {grid.shape}.")
        height, width = grid.shape
        flat = np.concatenate(([False], grid.ravel(), [False]))
        edges = np.flatnonzero(flat[1:] != flat[:-1])
        starts, ends = edges[0::2], edges[1::2]
        previous_ends = np.concatenate(([0], ends[:-1]))
        counts = np.empty(2 * len(starts), dtype=np.int64)
        counts[0::2] = starts - previous_ends
        counts[1::2] = ends - starts
        return cls(width=width, height=height, runs=tuple(int(c) for c in counts))

    @classmethod
    def from_bbox(cls, box: BBox, width: int, height: int) -> "BitMask":
        """Rasterize a box: a pixel is set when its center lies inside the box."""
        col0 = max(0, int(np.ceil(box.x_min - 0.5)))
        col1 = min(width, int(np.ceil(box.x_max - 0.5)))
        row0 = max(0, int(np.ceil(box.y_min - 0.5)))
        row1 = min(height, int(np.ceil(box.y_max - 0.5)))
        if col1 <= col0 or row1 <= row0:
            return cls.empty(width, height)
        span = col1 - col0
        if span == width:
            return cls(width=width, height=height, runs=(row0 * width, (row1 - row0) * width))
        runs = [row0 * width + col0, span]
        for _ in range(row1 - row0 - 1):
            runs.extend((width - span, span))
        return cls(width=width, height=height, runs=tuple(runs))

    @classmethod
    def from_rle(cls, rle: Dict[str, Any]) -> "BitMask":
        height, width = rle["size"]
        return cls(width=width, height=height, runs=tuple(rle.get("counts", ())))

    # --- Views ---

    def to_rle(self) -> Dict[str, Any]:
        return {"size": [self.height, self.width], "counts": list(self.runs)}

    def to_array(self) -> np.ndarray:
        """Decode into a (height, width) boolean array."""
        total = self.width * self.height
        delta = np.zeros(total + 1, dtype=np.int32)
        if self.runs:
            bounds = np.cumsum(np.asarray(self.runs, dtype=np.int64))
            delta[bounds[0::2]] += 1
            delta[bounds[1::2]] -= 1
        return (np.cumsum(delta[:-1]) > 0).reshape(self.height, self.width)

    @property
    def area(self) -> int:
        return int(sum(self.runs[1::2]))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def is_empty(self) -> bool:
        return not self.runs


def _check_same_shape(a: BitMask, b: BitMask) -> None:
    if a.shape != b.shape:
        raise MaskShapeError(f"Mask sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}.")


def iou_mask(a: BitMask, b: BitMask) -> float:
    """Pixel IoU of two equally sized masks; two empty masks score 0.0."""
    _check_same_shape(a, b)
    if a.is_empty() or b.is_empty():
        return 0.0
    grid_a, grid_b = a.to_array(), b.to_array()
    union = int(np.logical_or(grid_a, grid_b).sum())
    if union == 0:
        return 0.0
    return int(np.logical_and(grid_a, grid_b).sum()) / union


def mask_to_bbox(mask: BitMask) -> Optional[BBox]:
    """Tight half-open box over the set pixels, computed from the runs; None when empty."""
    if mask.is_empty():
        return None
    width = mask.width
    bounds = np.cumsum(np.asarray(mask.runs, dtype=np.int64))
    starts, ends = bounds[0::2], bounds[1::2] - 1  # ends are inclusive pixel indices
    start_rows, end_rows = starts // width, ends // width
    y_min, y_max = int(start_rows[0]), int(end_rows[-1]) + 1
    if np.any(start_rows != end_rows):
        # a run that wraps a row covers both the last and the first column
        return BBox(x_min=0, y_min=y_min, x_max=width, y_max=y_max)
    x_min = int((starts % width).min())
    x_max = int((ends % width).max()) + 1
    return BBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max)
