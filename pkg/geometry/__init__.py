"""
Geometric atoms shared by every pipeline stage: boxes, run-length encoded
masks, IoU, set similarity, and the JSON paths that locate bad input.
"""

from .boxes import BBox, boxes_to_array, compact_number, iou_bbox, iou_matrix
from .labels import jaccard, jaccard_distance
from .locations import json_path
from .masks import BitMask, MaskShapeError, iou_mask, mask_to_bbox

__all__ = [
    "BBox", "BitMask", "MaskShapeError",
    "boxes_to_array", "compact_number", "iou_bbox", "iou_matrix", "iou_mask",
    "jaccard", "jaccard_distance", "json_path", "mask_to_bbox",
]
