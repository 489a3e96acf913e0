"""Detection metrics: COCO-style mAP / mAR@1 and set-level precision, recall and F1 over IoU thresholds."""

from .matching import RECALL_POINTS, average_precision, interpolated_ap, match_detections, score_order
from .report import COCO_IOU_THRESHOLDS, CategoryMetrics, MetricsReport, evaluate, report_to_json

__all__ = [
    "COCO_IOU_THRESHOLDS", "RECALL_POINTS", "CategoryMetrics", "MetricsReport",
    "average_precision", "evaluate", "interpolated_ap", "match_detections", "report_to_json", "score_order",
]
