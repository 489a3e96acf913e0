# salient/synth/generator.py

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from geometry import BBox, BitMask, iou_matrix
from trackmodel import Direction, SeedMask, Track, TrackEntry, TrackSet

from .config import SynthConfig

logger = logging.getLogger(__name__)

SPURIOUS = None
_MAX_JITTER_HALVINGS = 32


class GroundTruth(BaseModel):
    """track_id -> true object index, or None for spurious tracks."""
    model_config = ConfigDict(frozen=True)

    objects: Dict[str, Optional[int]]

    def spurious(self) -> List[str]:
        return sorted(tid for tid, obj in self.objects.items() if obj is SPURIOUS)


def _entry(frame: int, xyxy: Sequence[float], cfg_masks: bool, width: int, height: int) -> TrackEntry:
    box = BBox.from_xyxy([float(v) for v in xyxy])
    mask = BitMask.from_bbox(box, width, height) if cfg_masks else None
    return TrackEntry(frame=frame, bbox=box, mask=mask)


def jitter_box(rng: np.random.Generator, truth: np.ndarray, sigma: float, min_iou: float,
               width: int, height: int) -> np.ndarray:
    """Gaussian corner noise, halved until the rounded box keeps IoU >= min_iou with the truth."""
    if sigma == 0:
        return truth
    noise = rng.normal(0.0, sigma, 4)
    scale = 1.0
    limits = np.array([width, height, width, height], dtype=np.float64)
    for _ in range(_MAX_JITTER_HALVINGS):
        candidate = np.clip(np.round(truth + noise * scale), 0.0, limits)
        if candidate[2] > candidate[0] and candidate[3] > candidate[1]:
            if iou_matrix(candidate[None, :], truth[None, :])[0, 0] >= min_iou:
                return candidate
        scale /= 2.0
    return truth


def object_trajectory(cfg: SynthConfig, index: int, rng: np.random.Generator) -> np.ndarray:
    """(frame_count, 4) integer xyxy boxes inside the object's own horizontal lane."""
    band = cfg.height / cfg.object_count
    box_h = rng.uniform(0.5, 0.75) * band
    center_y = (index + 0.5) * band + rng.uniform(-band / 8, band / 8)
    box_w = rng.uniform(min(40.0, cfg.width / 4), min(100.0, cfg.width / 2))
    interior = np.sort(rng.choice(np.arange(1, cfg.frame_count - 1), size=min(2, cfg.frame_count - 2), replace=False))
    times = np.concatenate(([0], interior, [cfg.frame_count - 1])).astype(np.float64)
    xs = rng.uniform(box_w / 2, cfg.width - box_w / 2, size=len(times))
    center_x = np.interp(np.arange(cfg.frame_count), times, xs)
    boxes = np.stack([
        center_x - box_w / 2,
        np.full(cfg.frame_count, center_y - box_h / 2),
        center_x + box_w / 2,
        np.full(cfg.frame_count, center_y + box_h / 2),
    ], axis=1)
    boxes = np.round(boxes)
    boxes[:, [0, 2]] = np.clip(boxes[:, [0, 2]], 0, cfg.width)
    boxes[:, [1, 3]] = np.clip(boxes[:, [1, 3]], 0, cfg.height)
    return boxes


def _object_tracks(cfg: SynthConfig, index: int) -> Tuple[List[SeedMask], List[Track]]:
    rng = np.random.default_rng([cfg.seed, index])
    truth = object_trajectory(cfg, index, rng)
    visible = [f for f in range(cfg.frame_count) if not cfg.occluded(index, f)]
    if not visible:
        return [], []
    seed_frames = sorted(rng.choice(visible, size=min(cfg.seeds_per_object, len(visible)), replace=False).tolist())

    seeds, tracks = [], []
    for j, seed_frame in enumerate(seed_frames):
        seeds.append(SeedMask(
            frame_index=seed_frame,
            mask=BitMask.from_bbox(BBox.from_xyxy(truth[seed_frame].tolist()), cfg.width, cfg.height),
        ))
        for direction, suffix in ((Direction.FORWARD, "fwd"), (Direction.BACKWARD, "bwd")):
            entries = [
                _entry(f, jitter_box(rng, truth[f], cfg.jitter, cfg.jitter_min_iou, cfg.width, cfg.height).tolist(),
                       cfg.masks, cfg.width, cfg.height)
                for f in visible
            ]
            tracks.append(Track(track_id=f"obj{index:02d}_seed{j:02d}_{suffix}", seed_frame=seed_frame,
                                direction=direction, entries=tuple(entries)))
    return seeds, tracks


def _spurious_track(cfg: SynthConfig, i: int) -> Track:
    rng = np.random.default_rng([cfg.seed, cfg.object_count + i])
    length = int(rng.integers(1, min(cfg.spurious_max_length, cfg.frame_count) + 1))
    start = int(rng.integers(0, cfg.frame_count - length + 1))
    w = min(float(rng.uniform(20, 40)), cfg.width / 2)
    h = min(float(rng.uniform(20, 40)), cfg.height / 2)
    x, y = rng.uniform(0, cfg.width - w), rng.uniform(0, cfg.height - h)
    entries = []
    for f in range(start, start + length):
        x = float(np.clip(x + rng.normal(0.0, 5.0), 0, cfg.width - w))
        y = float(np.clip(y + rng.normal(0.0, 5.0), 0, cfg.height - h))
        x0, y0 = round(x), round(y)
        x1, y1 = min(cfg.width, max(x0 + 1, round(x + w))), min(cfg.height, max(y0 + 1, round(y + h)))
        entries.append(_entry(f, [x0, y0, x1, y1], cfg.masks, cfg.width, cfg.height))
    return Track(track_id=f"spurious_{i:02d}", seed_frame=start, direction=Direction.UNSPECIFIED, entries=tuple(entries))


def generate(cfg: SynthConfig) -> Tuple[TrackSet, GroundTruth]:
    """Fabricate a seeded track set: per seed a forward and a backward track per object, plus spurious tracks."""
    if cfg.preset == "canonical":
        return canonical_scene()
    seeds: List[SeedMask] = []
    tracks: List[Track] = []
    truth: Dict[str, Optional[int]] = {}
    for k in range(cfg.object_count):
        object_seeds, object_tracks = _object_tracks(cfg, k)
        seeds.extend(object_seeds)
        tracks.extend(object_tracks)
        truth.update({t.track_id: k for t in object_tracks})
    for i in range(cfg.spurious_track_count):
        track = _spurious_track(cfg, i)
        tracks.append(track)
        truth[track.track_id] = SPURIOUS
    ts = TrackSet(video_id=f"synth_{cfg.seed}", frame_count=cfg.frame_count, width=cfg.width, height=cfg.height,
                  seeds=tuple(seeds), tracks=tuple(tracks))
    logger.info(f"Generated {len(tracks)} tracks ({cfg.spurious_track_count} spurious) over {cfg.frame_count} frames.")
    return ts, GroundTruth(objects=truth)


def _scene(video_id: str, width: int, height: int, frame_count: int,
           tracks: List[Tuple[str, int, Dict[int, Tuple[int, int, int, int]]]],
           seeds: List[Tuple[int, Tuple[int, int, int, int]]], truth: Dict[str, Optional[int]]) -> Tuple[TrackSet, GroundTruth]:
    built = [
        Track(track_id=tid, seed_frame=seed_frame,
              entries=tuple(_entry(f, box, True, width, height) for f, box in sorted(boxes.items())))
        for tid, seed_frame, boxes in tracks
    ]
    seed_masks = tuple(
        SeedMask(frame_index=f, mask=BitMask.from_bbox(BBox.from_xyxy(box), width, height)) for f, box in seeds
    )
    ts = TrackSet(video_id=video_id, frame_count=frame_count, width=width, height=height,
                  seeds=seed_masks, tracks=tuple(built))
    return ts, GroundTruth(objects=truth)


def canonical_scene() -> Tuple[TrackSet, GroundTruth]:
    """
    Two objects tracked over five frames whose boxes coincide at frame 2:
    A by a_red, a_yellow and a_blue (a_blue stops at frame 3), B by b_green and
    b_purple, plus m_magenta, a two-frame track off to the side.
    """
    a = {0: (10, 10, 40, 40), 1: (30, 10, 60, 40), 2: (80, 40, 110, 70), 3: (130, 10, 160, 40), 4: (150, 10, 180, 40)}
    b = {0: (10, 60, 40, 90), 1: (30, 60, 60, 90), 2: (80, 40, 110, 70), 3: (130, 60, 160, 90), 4: (150, 60, 180, 90)}
    magenta = {3: (185, 45, 199, 55), 4: (185, 45, 199, 55)}
    tracks = [
        ("a_red", 1, a),
        ("a_yellow", 1, a),
        ("a_blue", 3, {f: a[f] for f in range(4)}),
        ("b_green", 1, b),
        ("b_purple", 1, b),
        ("m_magenta", 3, magenta),
    ]
    seeds = [(1, a[1]), (1, b[1]), (3, a[3]), (3, magenta[3])]
    truth = {"a_red": 0, "a_yellow": 0, "a_blue": 0, "b_green": 1, "b_purple": 1, "m_magenta": SPURIOUS}
    return _scene("canonical", 200, 100, 5, tracks, seeds, truth)


def crossing_scene(frame_count: int = 20, crossing_frames: int = 4,
                   seeds_per_object: int = 2) -> Tuple[TrackSet, GroundTruth]:
    """Two objects in separate lanes that share one box during `crossing_frames` frames mid-video."""
    if not 0 <= crossing_frames < frame_count:
        raise ValueError(f"crossing_frames must be in [0, {frame_count}), got {crossing_frames}.")
    width, height = 400, 100
    start = (frame_count - crossing_frames) // 2
    step = (width - 40) / max(1, frame_count - 1)
    a, b = {}, {}
    for f in range(frame_count):
        x0 = int(round(f * step))
        if start <= f < start + crossing_frames:
            a[f] = b[f] = (x0, 35, x0 + 30, 65)
        else:
            a[f] = (x0, 5, x0 + 30, 35)
            b[f] = (x0, 65, x0 + 30, 95)
    tracks, seeds, truth = [], [], {}
    for label, boxes, obj in (("a", a, 0), ("b", b, 1)):
        for j in range(seeds_per_object):
            seed_frame = (j * frame_count) // seeds_per_object
            seeds.append((seed_frame, boxes[seed_frame]))
            for suffix in ("fwd", "bwd"):
                tid = f"{label}_seed{j:02d}_{suffix}"
                tracks.append((tid, seed_frame, boxes))
                truth[tid] = obj
    return _scene("crossing", width, height, frame_count, tracks, seeds, truth)
