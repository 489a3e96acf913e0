"""COCO-style dataset files and the detection / ground-truth records read for evaluation."""

from .coco import (
    DATASET_FORMAT, category_name, coco_to_dataset, dataset_detections, dataset_groundtruth,
    dataset_to_coco, dumps_dataset, read_dataset, write_dataset,
)
from .records import (
    DetectionRecord, GroundTruthRecord, RecordValidationError, detections_to_json, json_path,
    parse_detections, parse_groundtruth, read_detections, read_groundtruth, unknown_category_ids, write_detections,
)

__all__ = [
    "DATASET_FORMAT", "DetectionRecord", "GroundTruthRecord", "RecordValidationError",
    "category_name", "coco_to_dataset", "dataset_detections", "dataset_groundtruth", "dataset_to_coco",
    "detections_to_json", "dumps_dataset", "json_path", "parse_detections", "parse_groundtruth",
    "read_dataset", "read_detections", "read_groundtruth", "unknown_category_ids", "write_dataset",
    "write_detections",
]
