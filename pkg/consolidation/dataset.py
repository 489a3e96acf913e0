# salient/consolidation/dataset.py

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from clustering import ClusterParams, ObjectAssignment
from geometry import BBox, BitMask, mask_to_bbox
from trackmodel import TrackEntry, TrackSet, index_by_frame

from .aggregate import AggregationError, aggregate_masks

logger = logging.getLogger(__name__)


class SalientItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    frame_index: int = Field(ge=0)
    object_label: int = Field(ge=0)
    bbox: BBox
    mask: Optional[BitMask] = None

    @model_validator(mode="after")
    def _box_matches_mask(self) -> "SalientItem":
        if self.mask is not None and mask_to_bbox(self.mask) != self.bbox:
            raise ValueError(f"Item at frame {self.frame_index}, label {self.object_label}: box is not the mask's box.")
        return self


class SalientDataset(BaseModel):
    """Per-frame, per-object annotations produced by consolidation."""
    model_config = ConfigDict(frozen=True)

    video_id: str
    width: int = Field(ge=0)
    height: int = Field(ge=0)
    label_count: int = Field(ge=0)
    items: Tuple[SalientItem, ...] = ()
    provenance: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _check_items(self) -> "SalientDataset":
        seen = set()
        for item in self.items:
            key = (item.frame_index, item.object_label)
            if key in seen:
                raise ValueError(f"Two items for frame {key[0]}, label {key[1]}.")
            seen.add(key)
            if item.object_label >= self.label_count:
                raise ValueError(f"Item label {item.object_label} is outside [0, {self.label_count}).")
        return self

    def frames(self) -> List[int]:
        return sorted({item.frame_index for item in self.items})

    def labels_present(self) -> List[int]:
        return sorted({item.object_label for item in self.items})


def _median_box(entries: List[TrackEntry]) -> BBox:
    coords = np.median(np.asarray([e.bbox.to_xyxy() for e in entries], dtype=np.float64), axis=0)
    return BBox.from_xyxy([float(c) for c in coords])


def _build_item(frame: int, label: int, entries: List[TrackEntry]) -> Optional[SalientItem]:
    masks = [e.mask for e in entries if e.mask is not None]
    if masks:
        mask = aggregate_masks(masks)
        box = mask_to_bbox(mask)
        if box is None:
            logger.debug(f"Frame {frame}, label {label}: majority vote left an empty mask, no item.")
            return None
        return SalientItem(frame_index=frame, object_label=label, bbox=box, mask=mask)
    logger.debug(f"Frame {frame}, label {label}: no member masks, using the median box.")
    return SalientItem(frame_index=frame, object_label=label, bbox=_median_box(entries))


def assemble_dataset(ts: TrackSet, asg: ObjectAssignment, params: Optional[ClusterParams] = None,
                     source_sha256: Optional[str] = None) -> SalientDataset:
    """Aggregate member tracks per (frame, object label) into dataset items sorted by (frame, label)."""
    track_ids = {t.track_id for t in ts.tracks}
    unknown = sorted(set(asg.labels) - track_ids)
    if unknown:
        raise AggregationError(f"Assignment references unknown track ids: {', '.join(unknown)}")
    missing = sorted(track_ids - set(asg.labels))
    if missing:
        raise AggregationError(f"Assignment does not cover track ids: {', '.join(missing)}")

    items: List[SalientItem] = []
    box_only = 0
    for frame, entries in index_by_frame(ts).items():
        by_label: Dict[int, List[TrackEntry]] = {}
        for track_id, entry in entries:
            label = asg.labels[track_id]
            if label is not None:
                by_label.setdefault(label, []).append(entry)
        for label in sorted(by_label):
            item = _build_item(frame, label, by_label[label])
            if item is not None:
                items.append(item)
                box_only += item.mask is None
    if box_only:
        logger.warning(f"{box_only} items in '{ts.video_id}' had no member masks and carry a median box only.")

    provenance: Dict[str, Any] = {"params": (params or ClusterParams()).describe()}
    if source_sha256 is not None:
        provenance["source_sha256"] = source_sha256
    ds = SalientDataset(video_id=ts.video_id, width=ts.width, height=ts.height, label_count=asg.label_count,
                        items=tuple(items), provenance=provenance)
    logger.info(f"Assembled {len(ds.items)} items over {len(ds.frames())} frames, {ds.label_count} objects.")
    return ds


def split_dataset(ds: SalientDataset, val_ratio: float) -> Tuple[SalientDataset, SalientDataset]:
    """
    Deterministic train/val split by whole frames. The i-th frame (ascending)
    goes to val when floor((i + 1) * r) > floor(i * r), spreading val frames evenly.
    """
    if not 0.0 <= val_ratio <= 1.0:
        raise ValueError(f"val_ratio must be in [0, 1], got {val_ratio}.")
    val_frames = {
        frame for i, frame in enumerate(ds.frames())
        if math.floor((i + 1) * val_ratio) > math.floor(i * val_ratio)
    }
    train = ds.model_copy(update={"items": tuple(it for it in ds.items if it.frame_index not in val_frames)})
    val = ds.model_copy(update={"items": tuple(it for it in ds.items if it.frame_index in val_frames)})
    logger.info(f"Split {len(ds.frames())} frames into {len(ds.frames()) - len(val_frames)} train / {len(val_frames)} val.")
    return train, val
