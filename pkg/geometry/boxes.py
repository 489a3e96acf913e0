# salient/geometry/boxes.py

import logging
from typing import Iterable, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

logger = logging.getLogger(__name__)

Number = Union[int, float]


def compact_number(value: float) -> Number:
    """Integral floats serialize as ints so written files stay short and byte-stable."""
    if float(value).is_integer():
        return int(value)
    return float(value)


class BBox(BaseModel):
    """
    Axis-aligned box in image pixels, half-open: [x_min, x_max) x [y_min, y_max).
    Construction rejects boxes with zero or negative extent.
    """
    model_config = ConfigDict(frozen=True)

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @model_validator(mode="after")
    def _check_extent(self) -> "BBox":
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(
                f"Box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max}) has non-positive area."
            )
        return self

    @classmethod
    def from_xyxy(cls, coords: Sequence[float]) -> "BBox":
        x0, y0, x1, y1 = coords
        return cls(x_min=x0, y_min=y0, x_max=x1, y_max=y1)

    @classmethod
    def from_xywh(cls, coords: Sequence[float]) -> "BBox":
        x, y, w, h = coords
        return cls(x_min=x, y_min=y, x_max=x + w, y_max=y + h)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_xyxy(self) -> List[Number]:
        return [compact_number(v) for v in (self.x_min, self.y_min, self.x_max, self.y_max)]

    def to_xywh(self) -> List[Number]:
        return [compact_number(v) for v in (self.x_min, self.y_min, self.width, self.height)]

    def max_corner_delta(self, other: "BBox") -> float:
        return max(
            abs(self.x_min - other.x_min), abs(self.y_min - other.y_min),
            abs(self.x_max - other.x_max), abs(self.y_max - other.y_max),
        )


def iou_bbox(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0.0 when they are disjoint."""
    inter_w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    inter_h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if inter_w <= 0 or inter_h <= 0:
        return 0.0
    inter = inter_w * inter_h
    return inter / (a.area + b.area - inter)


def boxes_to_array(boxes: Iterable[BBox]) -> np.ndarray:
    """Stack boxes into an (n, 4) float array of x_min, y_min, x_max, y_max."""
    rows = [(b.x_min, b.y_min, b.x_max, b.y_max) for b in boxes]
    if not rows:
        return np.zeros((0, 4), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def iou_matrix(boxes_a: np.ndarray, boxes_b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between two (n, 4) / (m, 4) xyxy arrays, returned as (n, m)."""
    if boxes_a.shape[0] == 0 or boxes_b.shape[0] == 0:
        return np.zeros((boxes_a.shape[0], boxes_b.shape[0]), dtype=np.float64)
    a = boxes_a[:, None, :]
    b = boxes_b[None, :, :]
    inter_w = np.clip(np.minimum(a[..., 2], b[..., 2]) - np.maximum(a[..., 0], b[..., 0]), 0.0, None)
    inter_h = np.clip(np.minimum(a[..., 3], b[..., 3]) - np.maximum(a[..., 1], b[..., 1]), 0.0, None)
    inter = inter_w * inter_h
    area_a = (boxes_a[:, 2] - boxes_a[:, 0]) * (boxes_a[:, 3] - boxes_a[:, 1])
    area_b = (boxes_b[:, 2] - boxes_b[:, 0]) * (boxes_b[:, 3] - boxes_b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0)
