# salient/datasetio/records.py

import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, TypeAdapter, ValidationError

from geometry import BBox, compact_number, json_path

logger = logging.getLogger(__name__)


class RecordValidationError(ValueError):
    """A detection or ground-truth file that fails validation. `path` is a $-rooted JSON path."""

    def __init__(self, message: str, path: str = "$", source: Optional[str] = None):
        self.path = path
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}{path}: {message}")


class DetectionRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    image_id: int
    category_id: int
    bbox: BBox
    score: float = Field(ge=0.0, le=1.0)


class GroundTruthRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    image_id: int
    category_id: int
    bbox: BBox


# --- Wire models (COCO field names) ---
_XYWH = Tuple[float, float, PositiveFloat, PositiveFloat]

class _DetectionWire(BaseModel):
    model_config = ConfigDict(extra="ignore")
    image_id: int; category_id: int; bbox: _XYWH; score: float = Field(ge=0.0, le=1.0)

class _AnnotationWire(BaseModel):
    model_config = ConfigDict(extra="ignore")
    image_id: int; category_id: int; bbox: _XYWH

class _CategoryWire(BaseModel):
    model_config = ConfigDict(extra="ignore")
    id: int; name: Optional[str] = None

class _DetectionFile(BaseModel):
    annotations: List[_DetectionWire]

class _GroundTruthFile(BaseModel):
    model_config = ConfigDict(extra="ignore")
    annotations: List[_AnnotationWire]; categories: List[_CategoryWire] = []

_DetectionList = TypeAdapter(List[_DetectionWire])


def _raise_from(e: ValidationError, source: str) -> None:
    first = e.errors()[0]
    raise RecordValidationError(first["msg"], path=json_path(first["loc"]), source=source) from e


def _load_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise RecordValidationError(f"not valid JSON ({e.msg} at line {e.lineno})", source=str(path)) from e


def parse_detections(payload: Any, source: str = "detections") -> List[DetectionRecord]:
    """COCO results (a bare list) or an object holding `annotations` with scores."""
    try:
        if isinstance(payload, list):
            wire = _DetectionList.validate_python(payload)
        else:
            wire = _DetectionFile.model_validate(payload).annotations
    except ValidationError as e:
        _raise_from(e, source)
    return [
        DetectionRecord(image_id=w.image_id, category_id=w.category_id, bbox=BBox.from_xywh(w.bbox), score=w.score)
        for w in wire
    ]


def parse_groundtruth(payload: Any, source: str = "groundtruth") -> Tuple[List[GroundTruthRecord], Set[int]]:
    """COCO ground truth (dataset files written by this package included). Returns records and declared category ids."""
    try:
        wire = _GroundTruthFile.model_validate(payload)
    except ValidationError as e:
        _raise_from(e, source)
    records = [
        GroundTruthRecord(image_id=a.image_id, category_id=a.category_id, bbox=BBox.from_xywh(a.bbox))
        for a in wire.annotations
    ]
    return records, {c.id for c in wire.categories}


def read_detections(path: Union[str, Path]) -> List[DetectionRecord]:
    records = parse_detections(_load_json(path), source=str(path))
    logger.info(f"Read {len(records)} detections from {path}")
    return records


def read_groundtruth(path: Union[str, Path]) -> List[GroundTruthRecord]:
    records, categories = parse_groundtruth(_load_json(path), source=str(path))
    undeclared = sorted({r.category_id for r in records} - categories) if categories else []
    if undeclared:
        logger.warning(f"{path}: annotations use category ids {undeclared} missing from 'categories'.")
    logger.info(f"Read {len(records)} ground-truth boxes from {path}")
    return records


def unknown_category_ids(dets: Iterable[DetectionRecord], gts: Iterable[GroundTruthRecord]) -> List[int]:
    """Detection category ids with no ground truth. They are evaluated (as false positives), only reported."""
    unknown = sorted({d.category_id for d in dets} - {g.category_id for g in gts})
    if unknown:
        logger.warning(f"Detections use category ids with no ground truth: {unknown}")
    return unknown


def detections_to_json(records: Iterable[DetectionRecord]) -> List[dict]:
    return [
        {"image_id": r.image_id, "category_id": r.category_id, "bbox": r.bbox.to_xywh(), "score": compact_number(r.score)}
        for r in records
    ]


def write_detections(records: Iterable[DetectionRecord], path: Union[str, Path]) -> None:
    """Write COCO results format (a bare JSON list)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(detections_to_json(records), indent=2) + "\n")
