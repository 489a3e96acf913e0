import json

import pytest

from clustering import consolidate_tracks
from consolidation import SalientDataset, assemble_dataset
from datasetio import (
    RecordValidationError, coco_to_dataset, dataset_detections, dataset_groundtruth, dataset_to_coco, dumps_dataset,
    json_path, parse_detections, parse_groundtruth, read_dataset, read_detections, read_groundtruth,
    unknown_category_ids, write_dataset, write_detections,
)
from geometry import BBox


@pytest.fixture
def canonical_dataset(canonical_tracks):
    return assemble_dataset(canonical_tracks, consolidate_tracks(canonical_tracks).assignment, source_sha256="00ff")


def test_dataset_file_layout(canonical_dataset):
    coco = dataset_to_coco(canonical_dataset)
    assert list(coco) == ["info", "images", "annotations", "categories"]
    assert coco["categories"] == [{"id": 0, "name": "object_0"}, {"id": 1, "name": "object_1"}]
    assert [img["id"] for img in coco["images"]] == [0, 1, 2, 3, 4]
    assert [ann["id"] for ann in coco["annotations"]] == list(range(1, len(canonical_dataset.items) + 1))
    first = coco["annotations"][0]
    assert first["bbox"] == [10, 10, 30, 30]
    assert first["area"] == 900
    assert "segmentation" in first and first["iscrowd"] == 0
    assert coco["info"]["provenance"]["source_sha256"] == "00ff"


def test_dataset_write_read_is_byte_stable(canonical_dataset, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    write_dataset(canonical_dataset, first)
    loaded = read_dataset(first)
    assert loaded == canonical_dataset
    write_dataset(loaded, second)
    assert first.read_bytes() == second.read_bytes()


def test_empty_dataset_is_a_valid_file():
    empty = SalientDataset(video_id="nothing", width=0, height=0, label_count=0)
    coco = json.loads(dumps_dataset(empty))
    assert coco["images"] == [] and coco["annotations"] == [] and coco["categories"] == []
    assert coco_to_dataset(coco) == empty


def test_dataset_reader_rejects_foreign_files():
    with pytest.raises(RecordValidationError, match="format"):
        coco_to_dataset({"info": {"format": "other"}, "annotations": []})


def test_detections_accept_bare_list_and_annotations_object():
    record = {"image_id": 3, "category_id": 1, "bbox": [1, 2, 3, 4], "score": 0.7}
    bare = parse_detections([record])
    wrapped = parse_detections({"annotations": [record]})
    assert bare == wrapped
    assert bare[0].bbox == BBox.from_xywh([1, 2, 3, 4])


def test_out_of_range_score_is_rejected_with_its_location():
    with pytest.raises(RecordValidationError) as info:
        parse_detections([{"image_id": 0, "category_id": 0, "bbox": [0, 0, 1, 1], "score": 1.2}])
    assert info.value.path == "$[0].score"


def test_non_positive_width_is_rejected():
    with pytest.raises(RecordValidationError) as info:
        parse_groundtruth({"annotations": [{"image_id": 0, "category_id": 0, "bbox": [0, 0, 0, 5]}]})
    assert info.value.path.startswith("$.annotations[0].bbox")


def test_missing_field_is_reported():
    with pytest.raises(RecordValidationError, match="image_id"):
        parse_detections([{"category_id": 0, "bbox": [0, 0, 1, 1], "score": 0.5}])


def test_json_path_rendering():
    assert json_path(("annotations", 2, "bbox", 3)) == "$.annotations[2].bbox[3]"
    assert json_path(()) == "$"


def test_groundtruth_declares_categories():
    records, categories = parse_groundtruth({
        "annotations": [{"image_id": 0, "category_id": 4, "bbox": [0, 0, 2, 2], "area": 4}],
        "categories": [{"id": 4, "name": "cup"}],
    })
    assert categories == {4}
    assert records[0].category_id == 4


def test_files_round_trip(canonical_dataset, tmp_path):
    gt_path = tmp_path / "gt.json"
    det_path = tmp_path / "dets.json"
    write_dataset(canonical_dataset, gt_path)
    write_detections(dataset_detections(canonical_dataset, score=0.5), det_path)
    gts = read_groundtruth(gt_path)
    dets = read_detections(det_path)
    assert gts == dataset_groundtruth(canonical_dataset)
    assert [d.bbox for d in dets] == [g.bbox for g in gts]
    assert all(d.score == 0.5 for d in dets)


def test_bad_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("[{", encoding="utf-8")
    with pytest.raises(RecordValidationError, match="not valid JSON"):
        read_detections(path)


def test_unknown_category_ids_are_listed():
    dets = parse_detections([
        {"image_id": 0, "category_id": 0, "bbox": [0, 0, 1, 1], "score": 0.5},
        {"image_id": 0, "category_id": 7, "bbox": [0, 0, 1, 1], "score": 0.5},
    ])
    gts, _ = parse_groundtruth({"annotations": [{"image_id": 0, "category_id": 0, "bbox": [0, 0, 1, 1]}]})
    assert unknown_category_ids(dets, gts) == [7]
