# salient/evalmetrics/matching.py

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from datasetio import DetectionRecord, GroundTruthRecord
from geometry import boxes_to_array, iou_matrix

logger = logging.getLogger(__name__)

RECALL_POINTS = np.linspace(0.0, 1.0, 101)

Key = Tuple[int, int]


def score_order(dets: Sequence[DetectionRecord]) -> List[int]:
    """Indices of dets by descending score; equal scores keep input order."""
    return sorted(range(len(dets)), key=lambda i: -dets[i].score)


def _group(records: Sequence, indices: Sequence[int]) -> Dict[Key, List[int]]:
    groups: Dict[Key, List[int]] = {}
    for i in indices:
        groups.setdefault((records[i].image_id, records[i].category_id), []).append(i)
    return groups


def match_detections(dets: Sequence[DetectionRecord], gts: Sequence[GroundTruthRecord],
                     iou_thr: float) -> List[Optional[int]]:
    """
    Greedy one-to-one matching per (image, category). Detections are taken by
    descending score and each claims the unmatched ground truth of highest IoU
    when that IoU is >= iou_thr; equal IoUs go to the lower ground-truth index.
    Returns, for each input detection, the matched ground-truth index or None.
    """
    matches: List[Optional[int]] = [None] * len(dets)
    gt_groups = _group(gts, range(len(gts)))
    for key, det_idx in _group(dets, score_order(dets)).items():
        gt_idx = gt_groups.get(key)
        if not gt_idx:
            continue
        ious = iou_matrix(boxes_to_array(dets[i].bbox for i in det_idx), boxes_to_array(gts[j].bbox for j in gt_idx))
        taken = np.zeros(len(gt_idx), dtype=bool)
        for row, d in enumerate(det_idx):
            candidates = np.where(taken, -1.0, ious[row])
            best = int(np.argmax(candidates))  # argmax returns the first maximum
            if candidates[best] >= iou_thr:
                taken[best] = True
                matches[d] = gt_idx[best]
    return matches


def interpolated_ap(hits: Sequence[bool], gt_count: int) -> float:
    """101-point interpolated AP from hit flags already ordered by descending score."""
    if gt_count == 0 or len(hits) == 0:
        return 0.0
    flags = np.asarray(hits, dtype=bool)
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / gt_count
    precision = tp / (tp + fp)
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, RECALL_POINTS, side="left")
    sampled = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(sampled.mean())


def average_precision(dets: Sequence[DetectionRecord], gts: Sequence[GroundTruthRecord],
                      iou_thr: float) -> Optional[float]:
    """
    AP of one category's detections against its ground truth. None when both
    are empty (excluded from means); 0.0 when there are detections but no ground truth.
    """
    if not gts and not dets:
        return None
    if not gts:
        return 0.0
    matches = match_detections(dets, gts, iou_thr)
    return interpolated_ap([matches[i] is not None for i in score_order(dets)], len(gts))
