# salient/trackmodel/models.py

import bisect
import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from geometry import BBox, BitMask, mask_to_bbox

logger = logging.getLogger(__name__)


class FrameRangeError(ValueError):
    """Raised when a frame index falls outside a video's frame range."""


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    UNSPECIFIED = "unspecified"


class TrackEntry(BaseModel):
    """One tracked frame. Box-only entries (mask is None) are allowed."""
    model_config = ConfigDict(frozen=True)

    frame: int = Field(ge=0)
    bbox: BBox
    mask: Optional[BitMask] = None

    @model_validator(mode="after")
    def _box_matches_mask(self) -> "TrackEntry":
        if self.mask is not None and mask_to_bbox(self.mask) != self.bbox:
            raise ValueError(f"Frame {self.frame}: box does not equal the tight box of its mask.")
        return self


class SeedMask(BaseModel):
    model_config = ConfigDict(frozen=True)

    frame_index: int = Field(ge=0)
    mask: BitMask


class Track(BaseModel):
    model_config = ConfigDict(frozen=True)

    track_id: str
    seed_frame: int = Field(ge=0)
    direction: Direction = Direction.UNSPECIFIED
    entries: Tuple[TrackEntry, ...]

    @model_validator(mode="after")
    def _check_entries(self) -> "Track":
        if not self.entries:
            raise ValueError(f"Track '{self.track_id}' has no entries.")
        frames = [e.frame for e in self.entries]
        for prev, cur in zip(frames, frames[1:]):
            if cur <= prev:
                raise ValueError(f"Track '{self.track_id}': frame {cur} does not follow {prev}.")
        return self

    def frames(self) -> Tuple[int, ...]:
        return tuple(e.frame for e in self.entries)

    def entry_at(self, frame: int) -> Optional[TrackEntry]:
        frames = self.frames()
        i = bisect.bisect_left(frames, frame)
        if i < len(frames) and frames[i] == frame:
            return self.entries[i]
        return None


class TrackSet(BaseModel):
    """All tracks of one video plus the grasp seeds they came from."""
    model_config = ConfigDict(frozen=True)

    video_id: str
    frame_count: int = Field(ge=0)
    width: int = Field(ge=0)
    height: int = Field(ge=0)
    seeds: Tuple[SeedMask, ...] = ()
    tracks: Tuple[Track, ...] = ()

    @model_validator(mode="after")
    def _check_invariants(self) -> "TrackSet":
        seen = set()
        for track in self.tracks:
            if track.track_id in seen:
                raise ValueError(f"Duplicate track_id '{track.track_id}'.")
            seen.add(track.track_id)
            for entry in track.entries:
                if entry.frame >= self.frame_count:
                    raise ValueError(
                        f"Track '{track.track_id}' has frame {entry.frame} beyond frame_count {self.frame_count}."
                    )
                if entry.mask is not None and entry.mask.shape != (self.height, self.width):
                    raise ValueError(f"Track '{track.track_id}' frame {entry.frame}: mask size differs from the video.")
        for seed in self.seeds:
            if seed.frame_index >= self.frame_count:
                raise ValueError(f"Seed at frame {seed.frame_index} is beyond frame_count {self.frame_count}.")
        return self

    def track(self, track_id: str) -> Track:
        for track in self.tracks:
            if track.track_id == track_id:
                return track
        raise KeyError(track_id)

    def box_count(self) -> int:
        return sum(len(t.entries) for t in self.tracks)


def boxes_at_frame(ts: TrackSet, t: int) -> List[Tuple[str, BBox]]:
    """Boxes of every track with an entry at frame t, ordered by track_id."""
    if not 0 <= t < ts.frame_count:
        raise FrameRangeError(f"Frame {t} is outside [0, {ts.frame_count}).")
    found = []
    for track in ts.tracks:
        entry = track.entry_at(t)
        if entry is not None:
            found.append((track.track_id, entry.bbox))
    found.sort(key=lambda item: item[0])
    return found


def index_by_frame(ts: TrackSet) -> Dict[int, List[Tuple[str, TrackEntry]]]:
    """Frame -> [(track_id, entry)] for every frame with at least one entry, ids ascending."""
    index: Dict[int, List[Tuple[str, TrackEntry]]] = {}
    for track in sorted(ts.tracks, key=lambda tr: tr.track_id):
        for entry in track.entries:
            index.setdefault(entry.frame, []).append((track.track_id, entry))
    return dict(sorted(index.items()))
