import itertools

import numpy as np
import pytest

from clustering import ClusterParams, ObjectAssignment, consolidate_tracks
from consolidation import (
    AggregationError, SalientDataset, SalientItem, aggregate_masks, assemble_dataset, label_color, render_overlays,
    split_dataset, vote_threshold,
)
from geometry import BBox, BitMask, MaskShapeError
from trackmodel import Track, TrackEntry, TrackSet


def _random_mask(rng, shape=(6, 6), density=0.5):
    return BitMask.from_array(rng.random(shape) < density)


def _mask_entry(frame, box, width=20, height=20):
    bbox = BBox.from_xyxy(box)
    return TrackEntry(frame=frame, bbox=bbox, mask=BitMask.from_bbox(bbox, width, height))


# --- Aggregation ---

def test_vote_threshold_is_half_rounded_up():
    assert [vote_threshold(n) for n in range(1, 7)] == [1, 1, 2, 2, 3, 3]


def test_two_masks_give_their_union():
    a = BitMask.from_array(np.array([[1, 0], [0, 0]]))
    b = BitMask.from_array(np.array([[0, 1], [0, 0]]))
    assert aggregate_masks([a, b]) == BitMask.from_array(np.array([[1, 1], [0, 0]]))


def test_three_masks_keep_majority_pixels():
    a = BitMask.from_array(np.array([[1, 1, 0]]))
    b = BitMask.from_array(np.array([[1, 0, 1]]))
    c = BitMask.from_array(np.array([[1, 0, 0]]))
    assert aggregate_masks([a, b, c]) == BitMask.from_array(np.array([[1, 0, 0]]))


def test_aggregation_on_every_membership_pattern():
    # each pixel of a stack of 3x3 grids carries one membership pattern across the n masks
    for n in range(1, 6):
        patterns = list(itertools.product([False, True], repeat=n))
        for start in range(0, len(patterns), 9):
            chunk = patterns[start:start + 9]
            grids = np.zeros((n, 9), dtype=bool)
            for pixel, pattern in enumerate(chunk):
                grids[:, pixel] = pattern
            masks = [BitMask.from_array(g.reshape(3, 3)) for g in grids]
            result = aggregate_masks(masks).to_array().reshape(9)
            for pixel, pattern in enumerate(chunk):
                assert result[pixel] == (sum(pattern) >= (n + 1) // 2)


def test_aggregation_properties_on_random_triples():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        a, b, c = (_random_mask(rng, (3, 4), float(rng.random())) for _ in range(3))
        result = aggregate_masks([a, b, c])
        grid = result.to_array()
        stacked = np.stack([a.to_array(), b.to_array(), c.to_array()])
        assert not (stacked.all(axis=0) & ~grid).any()
        assert not (grid & ~stacked.any(axis=0)).any()
        assert aggregate_masks([c, a, b]) == result


def test_aggregation_is_idempotent():
    rng = np.random.default_rng(8)
    for _ in range(200):
        mask = _random_mask(rng)
        assert aggregate_masks([mask]) == mask
        assert aggregate_masks([mask] * int(rng.integers(2, 6))) == mask


def test_aggregation_rejects_bad_input():
    with pytest.raises(AggregationError):
        aggregate_masks([])
    with pytest.raises(MaskShapeError):
        aggregate_masks([BitMask.empty(3, 3), BitMask.empty(4, 3)])


# --- Dataset assembly ---

def test_canonical_scene_dataset(canonical_tracks):
    result = consolidate_tracks(canonical_tracks)
    ds = assemble_dataset(canonical_tracks, result.assignment, source_sha256="abc")
    assert ds.label_count == 2
    assert ds.labels_present() == [0, 1]
    assert ds.frames() == list(range(canonical_tracks.frame_count))
    assert [(it.frame_index, it.object_label) for it in ds.items] == sorted(
        (it.frame_index, it.object_label) for it in ds.items
    )
    crossing = [it for it in ds.items if it.frame_index == 2]
    assert [it.object_label for it in crossing] == [0, 1]
    assert all(it.mask is not None for it in ds.items)
    assert ds.provenance["source_sha256"] == "abc"
    assert ds.provenance["params"] == ClusterParams().describe()


def test_identical_member_masks_survive_unchanged():
    box = [2, 3, 9, 8]
    tracks = tuple(Track(track_id=f"t{i}", seed_frame=0, entries=(_mask_entry(0, box),)) for i in range(3))
    ts = TrackSet(video_id="v", frame_count=1, width=20, height=20, tracks=tracks)
    ds = assemble_dataset(ts, ObjectAssignment(labels={"t0": 0, "t1": 0, "t2": 0}, label_count=1))
    (item,) = ds.items
    assert item.bbox == BBox.from_xyxy(box)
    assert item.mask == BitMask.from_bbox(BBox.from_xyxy(box), 20, 20)


def test_empty_majority_emits_no_item():
    tracks = tuple(
        Track(track_id=f"t{i}", seed_frame=0, entries=(_mask_entry(0, [5 * i, 0, 5 * i + 4, 4]),)) for i in range(3)
    )
    ts = TrackSet(video_id="v", frame_count=1, width=20, height=20, tracks=tracks)
    ds = assemble_dataset(ts, ObjectAssignment(labels={"t0": 0, "t1": 0, "t2": 0}, label_count=1))
    assert ds.items == ()


def test_box_only_members_use_the_median_box():
    boxes = [[0, 0, 10, 10], [2, 2, 12, 12], [4, 1, 13, 11]]
    tracks = tuple(
        Track(track_id=f"t{i}", seed_frame=0, entries=(TrackEntry(frame=0, bbox=BBox.from_xyxy(b)),))
        for i, b in enumerate(boxes)
    )
    ts = TrackSet(video_id="v", frame_count=1, width=20, height=20, tracks=tracks)
    ds = assemble_dataset(ts, ObjectAssignment(labels={"t0": 0, "t1": 0, "t2": 0}, label_count=1))
    (item,) = ds.items
    assert item.mask is None
    assert item.bbox == BBox.from_xyxy([2, 1, 12, 11])


def test_discarded_tracks_contribute_nothing(canonical_tracks):
    result = consolidate_tracks(canonical_tracks)
    ds = assemble_dataset(canonical_tracks, result.assignment)
    magenta = canonical_tracks.track("m_magenta").entries[0].bbox
    assert all(item.bbox != magenta for item in ds.items)


def test_assignment_must_match_track_ids(canonical_tracks):
    labels = dict(consolidate_tracks(canonical_tracks).assignment.labels)
    labels["ghost"] = None
    with pytest.raises(AggregationError, match="ghost"):
        assemble_dataset(canonical_tracks, ObjectAssignment(labels=labels, label_count=2))
    del labels["ghost"], labels["a_red"]
    with pytest.raises(AggregationError, match="a_red"):
        assemble_dataset(canonical_tracks, ObjectAssignment(labels=labels, label_count=2))


def test_dataset_model_invariants():
    box = BBox.from_xyxy([0, 0, 2, 2])
    item = SalientItem(frame_index=0, object_label=0, bbox=box)
    with pytest.raises(ValueError):
        SalientDataset(video_id="v", width=4, height=4, label_count=1, items=(item, item))
    with pytest.raises(ValueError):
        SalientDataset(video_id="v", width=4, height=4, label_count=0, items=(item,))
    with pytest.raises(ValueError):
        SalientItem(frame_index=0, object_label=0, bbox=BBox.from_xyxy([0, 0, 3, 3]),
                    mask=BitMask.from_bbox(box, 4, 4))


# --- Split and overlays ---

def test_split_spreads_val_frames_evenly(canonical_tracks):
    ds = assemble_dataset(canonical_tracks, consolidate_tracks(canonical_tracks).assignment)
    train, val = split_dataset(ds, 0.4)
    assert val.frames() == [2, 4]
    assert train.frames() == [0, 1, 3]
    assert len(train.items) + len(val.items) == len(ds.items)

    train, val = split_dataset(ds, 0.0)
    assert val.items == () and train == ds
    train, val = split_dataset(ds, 1.0)
    assert train.items == () and val.frames() == ds.frames()
    with pytest.raises(ValueError):
        split_dataset(ds, 1.5)


def test_render_overlays_writes_one_png_per_frame(canonical_tracks, tmp_path):
    ds = assemble_dataset(canonical_tracks, consolidate_tracks(canonical_tracks).assignment)
    written = render_overlays(ds, tmp_path / "overlays")
    assert [p.name for p in written] == [f"frame_{f:06d}.png" for f in ds.frames()]
    assert all(p.stat().st_size > 0 for p in written)


def test_label_colors_are_stable_and_distinct():
    assert label_color(3) == label_color(3)
    assert len({label_color(i) for i in range(8)}) == 8
