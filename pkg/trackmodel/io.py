# salient/trackmodel/io.py

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from geometry import BBox, BitMask, MaskShapeError, json_path, mask_to_bbox

from .models import Direction, SeedMask, Track, TrackEntry, TrackSet

logger = logging.getLogger(__name__)

TRACK_FORMAT = "salient-tracks"
TRACK_FORMAT_VERSION = 1
# Boxes written by trackers are allowed to disagree with their mask by this many pixels.
BOX_MASK_TOLERANCE = 1.0


class TrackFormatError(ValueError):
    """A track file that cannot be read. Carries the offending line, track and frame when known."""

    def __init__(self, message: str, line: Optional[int] = None, track_id: Optional[str] = None,
                 frame: Optional[int] = None):
        self.line = line
        self.track_id = track_id
        self.frame = frame
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


# --- Wire models ---
class _RLE(BaseModel):
    size: List[int] = Field(min_length=2, max_length=2); counts: List[int]

class _Header(BaseModel):
    model_config = ConfigDict(extra="ignore")
    format: str; version: int; video_id: str
    frame_count: int = Field(ge=0); width: int = Field(ge=0); height: int = Field(ge=0)

class _SeedLine(BaseModel):
    kind: Literal["seed"]; frame: int = Field(ge=0); rle: _RLE

class _EntryLine(BaseModel):
    frame: int = Field(ge=0); bbox: Optional[List[float]] = Field(default=None, min_length=4, max_length=4)
    rle: Optional[_RLE] = None

class _TrackLine(BaseModel):
    model_config = ConfigDict(coerce_numbers_to_str=True)
    kind: Literal["track"]; track_id: str; seed_frame: int = Field(ge=0)
    direction: Direction = Direction.UNSPECIFIED; entries: List[_EntryLine]

_BodyLine = TypeAdapter(Annotated[Union[_SeedLine, _TrackLine], Field(discriminator="kind")])


def _format_validation_error(e: ValidationError) -> str:
    first = e.errors()[0]
    return f"{json_path(first['loc'])}: {first['msg']}"


def _to_mask(rle: _RLE, width: int, height: int) -> BitMask:
    mask = BitMask.from_rle(rle.model_dump())
    if mask.shape != (height, width):
        raise MaskShapeError(f"mask size {mask.width}x{mask.height} differs from video size {width}x{height}")
    return mask


def _build_entry(raw: _EntryLine, track_id: str, width: int, height: int, line: int) -> TrackEntry:
    mask = None
    if raw.rle is not None:
        try:
            mask = _to_mask(raw.rle, width, height)
        except (ValueError, ValidationError) as e:
            raise TrackFormatError(f"track '{track_id}' frame {raw.frame}: bad mask ({e})",
                                   line=line, track_id=track_id, frame=raw.frame) from e
    box = None
    if raw.bbox is not None:
        try:
            box = BBox.from_xyxy(raw.bbox)
        except ValidationError as e:
            raise TrackFormatError(f"track '{track_id}' frame {raw.frame}: invalid bbox {raw.bbox}",
                                   line=line, track_id=track_id, frame=raw.frame) from e

    if mask is not None:
        mask_box = mask_to_bbox(mask)
        if mask_box is None:
            logger.warning(f"Track '{track_id}' frame {raw.frame}: empty mask, keeping the entry box-only.")
            mask = None
        elif box is not None and box.max_corner_delta(mask_box) > BOX_MASK_TOLERANCE:
            raise TrackFormatError(
                f"track '{track_id}' frame {raw.frame}: bbox {box.to_xyxy()} disagrees with mask box "
                f"{mask_box.to_xyxy()} by more than {BOX_MASK_TOLERANCE:g} px",
                line=line, track_id=track_id, frame=raw.frame,
            )
        else:
            box = mask_box
    if box is None:
        raise TrackFormatError(f"track '{track_id}' frame {raw.frame}: entry has neither a bbox nor a nonempty mask",
                               line=line, track_id=track_id, frame=raw.frame)
    return TrackEntry(frame=raw.frame, bbox=box, mask=mask)


def parse_trackset(text: str, source_name: str = "tracks") -> TrackSet:
    """Parse track JSONL text. `source_name` names the video when the text is empty."""
    lines = [(no, ln) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        logger.warning(f"Track input '{source_name}' is empty; producing an empty track set.")
        return TrackSet(video_id=source_name, frame_count=0, width=0, height=0)

    header_no, header_text = lines[0]
    try:
        header = _Header.model_validate_json(header_text)
    except ValidationError as e:
        raise TrackFormatError(f"invalid header ({_format_validation_error(e)})", line=header_no) from e
    if header.format != TRACK_FORMAT:
        raise TrackFormatError(f"format '{header.format}' is not '{TRACK_FORMAT}'", line=header_no)
    if header.version != TRACK_FORMAT_VERSION:
        raise TrackFormatError(
            f"version mismatch: file has version {header.version}, this reader supports {TRACK_FORMAT_VERSION}",
            line=header_no,
        )

    seeds: List[SeedMask] = []
    tracks: List[Track] = []
    seen: Dict[str, int] = {}
    for line_no, raw_text in lines[1:]:
        try:
            body = _BodyLine.validate_json(raw_text)
        except ValidationError as e:
            raise TrackFormatError(_format_validation_error(e), line=line_no) from e

        if isinstance(body, _SeedLine):
            if body.frame >= header.frame_count:
                raise TrackFormatError(f"seed frame {body.frame} is beyond frame_count {header.frame_count}",
                                       line=line_no, frame=body.frame)
            try:
                seeds.append(SeedMask(frame_index=body.frame, mask=_to_mask(body.rle, header.width, header.height)))
            except (ValueError, ValidationError) as e:
                raise TrackFormatError(f"seed at frame {body.frame}: bad mask ({e})", line=line_no, frame=body.frame) from e
            continue

        track_id = body.track_id
        if track_id in seen:
            raise TrackFormatError(f"duplicate track_id '{track_id}' (first seen on line {seen[track_id]})",
                                   line=line_no, track_id=track_id)
        seen[track_id] = line_no
        if not body.entries:
            raise TrackFormatError(f"track '{track_id}' has no entries", line=line_no, track_id=track_id)
        previous = -1
        for raw in body.entries:
            if raw.frame <= previous:
                raise TrackFormatError(f"track '{track_id}': frame {raw.frame} does not follow frame {previous}",
                                       line=line_no, track_id=track_id, frame=raw.frame)
            if raw.frame >= header.frame_count:
                raise TrackFormatError(
                    f"track '{track_id}': frame {raw.frame} is beyond frame_count {header.frame_count}",
                    line=line_no, track_id=track_id, frame=raw.frame,
                )
            previous = raw.frame
        entries = tuple(_build_entry(raw, track_id, header.width, header.height, line_no) for raw in body.entries)
        tracks.append(Track(track_id=track_id, seed_frame=body.seed_frame, direction=body.direction, entries=entries))

    if not tracks:
        logger.warning(f"Track input '{source_name}' holds no tracks.")
    ts = TrackSet(video_id=header.video_id, frame_count=header.frame_count, width=header.width,
                  height=header.height, seeds=tuple(seeds), tracks=tuple(tracks))
    logger.info(f"Loaded {len(ts.tracks)} tracks, {len(ts.seeds)} seeds, {ts.box_count()} boxes for '{ts.video_id}'.")
    return ts


def load_trackset(path: Union[str, Path]) -> TrackSet:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_trackset(text, source_name=path.stem)


def _dumps(obj: Dict[str, Any]) -> str:
    return json.dumps(obj, separators=(",", ":"))


def dump_trackset(ts: TrackSet) -> str:
    """Render a TrackSet as track JSONL: header, seeds, then tracks in stored order."""
    out = [_dumps({
        "format": TRACK_FORMAT, "version": TRACK_FORMAT_VERSION, "video_id": ts.video_id,
        "frame_count": ts.frame_count, "width": ts.width, "height": ts.height,
    })]
    for seed in ts.seeds:
        out.append(_dumps({"kind": "seed", "frame": seed.frame_index, "rle": seed.mask.to_rle()}))
    for track in ts.tracks:
        entries = []
        for entry in track.entries:
            item: Dict[str, Any] = {"frame": entry.frame, "bbox": entry.bbox.to_xyxy()}
            if entry.mask is not None:
                item["rle"] = entry.mask.to_rle()
            entries.append(item)
        out.append(_dumps({
            "kind": "track", "track_id": track.track_id, "seed_frame": track.seed_frame,
            "direction": track.direction.value, "entries": entries,
        }))
    return "\n".join(out) + "\n"


def write_trackset(ts: TrackSet, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dump_trackset(ts))
    logger.info(f"Wrote {len(ts.tracks)} tracks to {path}")
