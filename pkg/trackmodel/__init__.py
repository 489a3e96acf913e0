"""Track files produced by upstream grasp detection and mask tracking."""

from .io import TRACK_FORMAT, TRACK_FORMAT_VERSION, TrackFormatError, dump_trackset, load_trackset, parse_trackset, write_trackset
from .models import Direction, FrameRangeError, SeedMask, Track, TrackEntry, TrackSet, boxes_at_frame, index_by_frame

__all__ = [
    "TRACK_FORMAT", "TRACK_FORMAT_VERSION",
    "Direction", "FrameRangeError", "SeedMask", "Track", "TrackEntry", "TrackFormatError", "TrackSet",
    "boxes_at_frame", "dump_trackset", "index_by_frame", "load_trackset", "parse_trackset", "write_trackset",
]
