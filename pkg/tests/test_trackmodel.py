import json

import pytest

from geometry import BBox, BitMask
from synth import SynthConfig, generate
from trackmodel import (
    Direction, FrameRangeError, Track, TrackEntry, TrackFormatError, TrackSet, boxes_at_frame, dump_trackset,
    index_by_frame, load_trackset, parse_trackset, write_trackset,
)

HEADER = {"format": "salient-tracks", "version": 1, "video_id": "demo", "frame_count": 4, "width": 8, "height": 6}


def _rle(box, width=8, height=6):
    return BitMask.from_bbox(BBox.from_xyxy(box), width, height).to_rle()


def _track(track_id, entries, seed_frame=0, direction="forward"):
    return {"kind": "track", "track_id": track_id, "seed_frame": seed_frame, "direction": direction,
            "entries": entries}


def _jsonl(*lines, header=HEADER):
    return "\n".join(json.dumps(obj) for obj in (header, *lines)) + "\n"


def _two_track_text():
    return _jsonl(
        {"kind": "seed", "frame": 1, "rle": _rle([1, 1, 4, 4])},
        _track("a", [{"frame": 0, "bbox": [1, 1, 4, 4], "rle": _rle([1, 1, 4, 4])},
                     {"frame": 1, "bbox": [2, 1, 5, 4], "rle": _rle([2, 1, 5, 4])}]),
        _track("b", [{"frame": 1, "bbox": [2, 1, 5, 4]}, {"frame": 3, "bbox": [0, 0, 2, 2]}], seed_frame=1,
               direction="backward"),
    )


def test_load_well_formed_file(tmp_path):
    path = tmp_path / "demo.jsonl"
    path.write_text(_two_track_text(), encoding="utf-8")
    ts = load_trackset(path)
    assert ts.video_id == "demo"
    assert [t.track_id for t in ts.tracks] == ["a", "b"]
    assert ts.track("b").direction is Direction.BACKWARD
    assert ts.track("b").entry_at(3).mask is None
    assert ts.track("a").frames() == (0, 1)
    assert len(ts.seeds) == 1 and ts.seeds[0].frame_index == 1


def test_duplicate_track_id_is_named():
    text = _jsonl(_track("dup", [{"frame": 0, "bbox": [0, 0, 1, 1]}]),
                  _track("dup", [{"frame": 1, "bbox": [0, 0, 1, 1]}]))
    with pytest.raises(TrackFormatError) as info:
        parse_trackset(text)
    assert "dup" in str(info.value)
    assert info.value.line == 3


def test_box_mask_mismatch_beyond_one_pixel_cites_track_and_frame():
    text = _jsonl(_track("a", [{"frame": 2, "bbox": [1, 1, 6, 4], "rle": _rle([1, 1, 4, 4])}]))
    with pytest.raises(TrackFormatError) as info:
        parse_trackset(text)
    assert info.value.track_id == "a"
    assert info.value.frame == 2
    assert "frame 2" in str(info.value)


def test_box_within_one_pixel_is_replaced_by_mask_box():
    text = _jsonl(_track("a", [{"frame": 0, "bbox": [1.5, 1, 4, 4.8], "rle": _rle([1, 1, 4, 4])}]))
    entry = parse_trackset(text).track("a").entries[0]
    assert entry.bbox == BBox.from_xyxy([1, 1, 4, 4])


def test_version_mismatch():
    with pytest.raises(TrackFormatError, match="version"):
        parse_trackset(_jsonl(header={**HEADER, "version": 2}))


def test_bad_json_line_reports_line_number():
    text = json.dumps(HEADER) + "\n" + '{"kind": "track", "track_id": "a"\n'
    with pytest.raises(TrackFormatError) as info:
        parse_trackset(text)
    assert info.value.line == 2


def test_frame_order_and_range_are_checked():
    with pytest.raises(TrackFormatError, match="does not follow"):
        parse_trackset(_jsonl(_track("a", [{"frame": 1, "bbox": [0, 0, 1, 1]}, {"frame": 1, "bbox": [0, 0, 1, 1]}])))
    with pytest.raises(TrackFormatError, match="beyond frame_count"):
        parse_trackset(_jsonl(_track("a", [{"frame": 4, "bbox": [0, 0, 1, 1]}])))


def test_empty_mask_keeps_entry_box_only():
    empty = BitMask.empty(8, 6).to_rle()
    ts = parse_trackset(_jsonl(_track("a", [{"frame": 0, "bbox": [0, 0, 2, 2], "rle": empty}])))
    assert ts.track("a").entries[0].mask is None


def test_empty_input_gives_empty_trackset():
    ts = parse_trackset("", source_name="nothing")
    assert ts.video_id == "nothing"
    assert ts.tracks == () and ts.frame_count == 0


def test_boxes_at_frame_is_sorted_and_range_checked():
    ts = parse_trackset(_two_track_text())
    assert [tid for tid, _ in boxes_at_frame(ts, 1)] == ["a", "b"]
    assert boxes_at_frame(ts, 2) == []
    with pytest.raises(FrameRangeError):
        boxes_at_frame(ts, ts.frame_count)
    with pytest.raises(FrameRangeError):
        boxes_at_frame(ts, -1)


def test_canonical_scene_frame_two_holds_five_boxes(canonical_tracks):
    boxes = boxes_at_frame(canonical_tracks, 2)
    assert [tid for tid, _ in boxes] == ["a_blue", "a_red", "a_yellow", "b_green", "b_purple"]


def test_box_count_matches_per_frame_sum():
    ts, _ = generate(SynthConfig(object_count=3, frame_count=25, spurious_track_count=2, jitter=2.0, seed=4))
    assert sum(len(boxes_at_frame(ts, t)) for t in range(ts.frame_count)) == ts.box_count()
    assert sum(len(v) for v in index_by_frame(ts).values()) == ts.box_count()


def test_write_then_load_round_trips(tmp_path):
    ts, _ = generate(SynthConfig(object_count=2, frame_count=12, jitter=1.5, spurious_track_count=1, seed=9))
    first = tmp_path / "first.jsonl"
    second = tmp_path / "second.jsonl"
    write_trackset(ts, first)
    loaded = load_trackset(first)
    assert loaded == ts
    write_trackset(loaded, second)
    assert first.read_bytes() == second.read_bytes()


def test_model_invariants():
    box = BBox.from_xyxy([0, 0, 2, 2])
    with pytest.raises(ValueError):
        TrackEntry(frame=0, bbox=BBox.from_xyxy([0, 0, 3, 3]), mask=BitMask.from_bbox(box, 4, 4))
    with pytest.raises(ValueError):
        Track(track_id="x", seed_frame=0, entries=())
    track = Track(track_id="x", seed_frame=0, entries=(TrackEntry(frame=5, bbox=box),))
    with pytest.raises(ValueError):
        TrackSet(video_id="v", frame_count=5, width=4, height=4, tracks=(track,))
    assert dump_trackset(TrackSet(video_id="v", frame_count=6, width=4, height=4, tracks=(track,))).count("\n") == 2
