# salient/datasetio/coco.py

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from consolidation import SalientDataset, SalientItem
from geometry import BBox, BitMask, compact_number, mask_to_bbox

from .records import DetectionRecord, GroundTruthRecord, RecordValidationError

logger = logging.getLogger(__name__)

DATASET_FORMAT = "salient-dataset"


def category_name(label: int) -> str:
    return f"object_{label}"


def dataset_to_coco(ds: SalientDataset) -> Dict[str, Any]:
    """COCO-style dict with a fixed key order: info, images, annotations, categories."""
    images = [{"id": f, "frame_index": f, "width": ds.width, "height": ds.height} for f in ds.frames()]
    annotations = []
    for ann_id, item in enumerate(ds.items, start=1):
        ann: Dict[str, Any] = {
            "id": ann_id,
            "image_id": item.frame_index,
            "category_id": item.object_label,
            "bbox": item.bbox.to_xywh(),
            "area": item.mask.area if item.mask is not None else compact_number(item.bbox.area),
            "iscrowd": 0,
        }
        if item.mask is not None:
            ann["segmentation"] = item.mask.to_rle()
        annotations.append(ann)
    return {
        "info": {
            "format": DATASET_FORMAT,
            "video_id": ds.video_id,
            "width": ds.width,
            "height": ds.height,
            "label_count": ds.label_count,
            "provenance": ds.provenance,
        },
        "images": images,
        "annotations": annotations,
        "categories": [{"id": k, "name": category_name(k)} for k in range(ds.label_count)],
    }


def dumps_dataset(ds: SalientDataset) -> str:
    return json.dumps(dataset_to_coco(ds), indent=2) + "\n"


def write_dataset(ds: SalientDataset, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_dataset(ds))
    logger.info(f"Wrote {len(ds.items)} annotations, {ds.label_count} categories to {path}")


def coco_to_dataset(payload: Dict[str, Any], source: str = "dataset") -> SalientDataset:
    info = payload.get("info") or {}
    if info.get("format") != DATASET_FORMAT:
        raise RecordValidationError(f"info.format is not '{DATASET_FORMAT}'", path="$.info.format", source=source)
    items: List[SalientItem] = []
    for i, ann in enumerate(payload.get("annotations", [])):
        try:
            mask = BitMask.from_rle(ann["segmentation"]) if "segmentation" in ann else None
            box = mask_to_bbox(mask) if mask is not None else BBox.from_xywh(ann["bbox"])
            items.append(SalientItem(frame_index=ann["image_id"], object_label=ann["category_id"], bbox=box, mask=mask))
        except (KeyError, TypeError, ValueError) as e:
            raise RecordValidationError(str(e), path=f"$.annotations[{i}]", source=source) from e
    try:
        return SalientDataset(
            video_id=info["video_id"], width=info["width"], height=info["height"],
            label_count=info["label_count"], items=tuple(items), provenance=info.get("provenance", {}),
        )
    except (KeyError, ValueError) as e:
        raise RecordValidationError(str(e), path="$.info", source=source) from e


def read_dataset(path: Union[str, Path]) -> SalientDataset:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    return coco_to_dataset(payload, source=str(path))


def dataset_detections(ds: SalientDataset, score: float = 1.0) -> List[DetectionRecord]:
    """Every dataset item as a detection with a fixed score."""
    return [
        DetectionRecord(image_id=it.frame_index, category_id=it.object_label, bbox=it.bbox, score=score)
        for it in ds.items
    ]


def dataset_groundtruth(ds: SalientDataset) -> List[GroundTruthRecord]:
    return [GroundTruthRecord(image_id=it.frame_index, category_id=it.object_label, bbox=it.bbox) for it in ds.items]
