# salient/evalmetrics/report.py

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from datasetio import DetectionRecord, GroundTruthRecord

from .matching import average_precision, match_detections

logger = logging.getLogger(__name__)

COCO_IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


class CategoryMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    ap_50_95: float
    ar_1: Optional[float]
    precision_50_95: float
    recall_50_95: float
    f1_50_95: float


class MetricsReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    map_50_95: float
    mar_1: float
    f1_50_95: float
    precision_50_95: float
    recall_50_95: float
    per_category: Dict[int, CategoryMetrics]


def _mean(values: Sequence[Optional[float]]) -> float:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else 0.0


def _f1(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def _top1(dets: Sequence[DetectionRecord]) -> List[DetectionRecord]:
    """Highest-scored detection per (image, category); earliest wins ties."""
    best: Dict[tuple, DetectionRecord] = {}
    for det in dets:
        key = (det.image_id, det.category_id)
        if key not in best or det.score > best[key].score:
            best[key] = det
    return list(best.values())


def _set_level(dets: Sequence[DetectionRecord], gts: Sequence[GroundTruthRecord], thr: float,
               score_cutoff: float) -> tuple:
    kept = [d for d in dets if d.score >= score_cutoff]
    tp = sum(m is not None for m in match_detections(kept, gts, thr))
    precision = tp / len(kept) if kept else 0.0
    recall = tp / len(gts) if gts else 0.0
    return precision, recall, _f1(precision, recall)


def _recall(dets: Sequence[DetectionRecord], gts: Sequence[GroundTruthRecord], thr: float) -> Optional[float]:
    if not gts:
        return None
    return sum(m is not None for m in match_detections(dets, gts, thr)) / len(gts)


def evaluate(dets: Sequence[DetectionRecord], gts: Sequence[GroundTruthRecord], score_cutoff: float = 0.5,
             iou_thresholds: Sequence[float] = COCO_IOU_THRESHOLDS) -> MetricsReport:
    """
    mAP and mAR@1 averaged over categories then IoU thresholds, and set-level
    precision / recall / F1 over detections scoring >= score_cutoff, computed
    per threshold and then averaged. Categories with neither ground truth nor
    detections do not exist here; categories with detections only score AP 0.
    """
    categories = sorted({g.category_id for g in gts} | {d.category_id for d in dets})
    dets_by_cat = {c: [d for d in dets if d.category_id == c] for c in categories}
    gts_by_cat = {c: [g for g in gts if g.category_id == c] for c in categories}
    top1_by_cat = {c: _top1(dets_by_cat[c]) for c in categories}

    ap = {c: [average_precision(dets_by_cat[c], gts_by_cat[c], t) for t in iou_thresholds] for c in categories}
    ar = {c: [_recall(top1_by_cat[c], gts_by_cat[c], t) for t in iou_thresholds] for c in categories}
    per_thr_set = [_set_level(dets, gts, t, score_cutoff) for t in iou_thresholds]

    per_category = {}
    for c in categories:
        cat_set = [_set_level(dets_by_cat[c], gts_by_cat[c], t, score_cutoff) for t in iou_thresholds]
        per_category[c] = CategoryMetrics(
            ap_50_95=_mean(ap[c]),
            ar_1=_mean(ar[c]) if gts_by_cat[c] else None,
            precision_50_95=_mean([s[0] for s in cat_set]),
            recall_50_95=_mean([s[1] for s in cat_set]),
            f1_50_95=_mean([s[2] for s in cat_set]),
        )

    report = MetricsReport(
        map_50_95=_mean([_mean([ap[c][k] for c in categories]) for k in range(len(iou_thresholds))]),
        mar_1=_mean([_mean([ar[c][k] for c in categories]) for k in range(len(iou_thresholds))]),
        f1_50_95=_mean([s[2] for s in per_thr_set]),
        precision_50_95=_mean([s[0] for s in per_thr_set]),
        recall_50_95=_mean([s[1] for s in per_thr_set]),
        per_category=per_category,
    )
    logger.info(f"Evaluated {len(dets)} detections against {len(gts)} boxes: mAP {report.map_50_95:.4f}")
    return report


def report_to_json(report: MetricsReport) -> Dict[str, Any]:
    """Report dict with keys in a fixed order; category ids become string keys."""
    return {
        "map_50_95": report.map_50_95,
        "mar_1": report.mar_1,
        "f1_50_95": report.f1_50_95,
        "precision_50_95": report.precision_50_95,
        "recall_50_95": report.recall_50_95,
        "per_category": {str(c): m.model_dump() for c, m in sorted(report.per_category.items())},
    }
