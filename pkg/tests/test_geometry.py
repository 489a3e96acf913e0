import numpy as np
import pytest
from pydantic import ValidationError

from geometry import (
    BBox, BitMask, MaskShapeError, boxes_to_array, compact_number, iou_bbox, iou_mask, iou_matrix, jaccard,
    jaccard_distance, json_path, mask_to_bbox,
)


def _pixel_iou(a: BBox, b: BBox, size: int = 40) -> float:
    grid_a = np.zeros((size, size), dtype=bool)
    grid_b = np.zeros((size, size), dtype=bool)
    grid_a[int(a.y_min):int(a.y_max), int(a.x_min):int(a.x_max)] = True
    grid_b[int(b.y_min):int(b.y_max), int(b.x_min):int(b.x_max)] = True
    union = np.logical_or(grid_a, grid_b).sum()
    return float(np.logical_and(grid_a, grid_b).sum() / union)


def _random_box(rng, size: int = 40) -> BBox:
    x0, y0 = rng.integers(0, size - 1, 2)
    x1 = rng.integers(x0 + 1, size + 1)
    y1 = rng.integers(y0 + 1, size + 1)
    return BBox.from_xyxy([int(x0), int(y0), int(x1), int(y1)])


# --- Boxes ---

def test_bbox_rejects_non_positive_extent():
    with pytest.raises(ValidationError):
        BBox.from_xyxy([5, 5, 5, 10])
    with pytest.raises(ValidationError):
        BBox.from_xywh([0, 0, 3, -1])


def test_bbox_views():
    box = BBox.from_xywh([2, 3, 4, 5])
    assert box.to_xyxy() == [2, 3, 6, 8]
    assert box.to_xywh() == [2, 3, 4, 5]
    assert box.area == 20
    assert compact_number(2.0) == 2 and isinstance(compact_number(2.0), int)
    assert compact_number(2.5) == 2.5


def test_iou_bbox_examples():
    a = BBox.from_xyxy([0, 0, 10, 10])
    assert iou_bbox(a, a) == 1.0
    assert iou_bbox(a, BBox.from_xyxy([20, 20, 30, 30])) == 0.0
    assert iou_bbox(a, BBox.from_xyxy([5, 0, 15, 10])) == pytest.approx(1 / 3, abs=1e-12)
    # touching edges share no area
    assert iou_bbox(a, BBox.from_xyxy([10, 0, 20, 10])) == 0.0


def test_iou_bbox_matches_pixel_counting():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a, b = _random_box(rng), _random_box(rng)
        assert iou_bbox(a, b) == pytest.approx(_pixel_iou(a, b), abs=1e-9)
        assert iou_bbox(a, b) == iou_bbox(b, a)
        assert 0.0 <= iou_bbox(a, b) <= 1.0


def test_iou_matrix_agrees_with_pairwise():
    rng = np.random.default_rng(3)
    boxes_a = [_random_box(rng) for _ in range(6)]
    boxes_b = [_random_box(rng) for _ in range(4)]
    matrix = iou_matrix(boxes_to_array(boxes_a), boxes_to_array(boxes_b))
    assert matrix.shape == (6, 4)
    for i, a in enumerate(boxes_a):
        for j, b in enumerate(boxes_b):
            assert matrix[i, j] == pytest.approx(iou_bbox(a, b), abs=1e-12)
    assert iou_matrix(boxes_to_array([]), boxes_to_array(boxes_b)).shape == (0, 4)


# --- Masks ---

def test_rle_is_canonical_and_round_trips():
    rng = np.random.default_rng(11)
    for _ in range(200):
        grid = rng.random((5, 7)) < 0.4
        mask = BitMask.from_array(grid)
        assert np.array_equal(mask.to_array(), grid)
        assert mask.area == int(grid.sum())
        assert BitMask.from_array(mask.to_array()) == mask
        assert BitMask.from_rle(mask.to_rle()) == mask


def test_rle_validation():
    with pytest.raises(ValidationError):
        BitMask(width=2, height=2, runs=(0, 5))
    with pytest.raises(ValidationError):
        BitMask(width=2, height=2, runs=(1, 0))
    with pytest.raises(ValidationError):
        BitMask(width=2, height=2, runs=(1,))
    assert BitMask(width=2, height=2, runs=(0, 4)).area == 4


def test_from_bbox_matches_rasterized_array():
    rng = np.random.default_rng(5)
    for _ in range(300):
        box = _random_box(rng, size=12)
        expected = np.zeros((12, 12), dtype=bool)
        expected[int(box.y_min):int(box.y_max), int(box.x_min):int(box.x_max)] = True
        mask = BitMask.from_bbox(box, 12, 12)
        assert mask == BitMask.from_array(expected)
        assert mask_to_bbox(mask) == box


def test_from_bbox_clips_to_canvas():
    mask = BitMask.from_bbox(BBox.from_xyxy([-5, 2, 3, 40]), 6, 6)
    assert mask_to_bbox(mask) == BBox.from_xyxy([0, 2, 3, 6])
    assert BitMask.from_bbox(BBox.from_xyxy([10, 10, 12, 12]), 6, 6).is_empty()


def test_iou_mask_examples():
    full = BitMask.from_array(np.ones((4, 4)))
    empty = BitMask.empty(4, 4)
    checker = np.indices((4, 4)).sum(axis=0) % 2 == 0
    assert iou_mask(full, full) == 1.0
    assert iou_mask(empty, full) == 0.0
    assert iou_mask(empty, empty) == 0.0
    assert iou_mask(BitMask.from_array(checker), BitMask.from_array(~checker)) == 0.0
    assert iou_mask(BitMask.from_array(checker), full) == pytest.approx(0.5)


def test_iou_mask_size_mismatch():
    with pytest.raises(MaskShapeError):
        iou_mask(BitMask.empty(4, 4), BitMask.empty(5, 4))


def test_mask_to_bbox_examples():
    grid = np.zeros((10, 10), dtype=bool)
    grid[7, 3] = True
    assert mask_to_bbox(BitMask.from_array(grid)) == BBox.from_xyxy([3, 7, 4, 8])

    assert mask_to_bbox(BitMask.from_array(np.ones((6, 9)))) == BBox.from_xyxy([0, 0, 9, 6])
    assert mask_to_bbox(BitMask.empty(3, 3)) is None

    l_shape = np.zeros((10, 10), dtype=bool)
    l_shape[2:6, 1] = True
    l_shape[5, 1:9] = True
    assert mask_to_bbox(BitMask.from_array(l_shape)) == BBox.from_xyxy([1, 2, 9, 6])


def test_mask_to_bbox_run_wrapping_a_row():
    grid = np.zeros((3, 4), dtype=bool)
    grid[0, 3] = grid[1, 0] = True
    assert mask_to_bbox(BitMask.from_array(grid)) == BBox.from_xyxy([0, 0, 4, 2])


def test_mask_to_bbox_matches_pixel_scan():
    rng = np.random.default_rng(19)
    for _ in range(300):
        grid = rng.random((6, 8)) < 0.15
        box = mask_to_bbox(BitMask.from_array(grid))
        if not grid.any():
            assert box is None
            continue
        rows, cols = np.nonzero(grid)
        assert box == BBox.from_xyxy([cols.min(), rows.min(), cols.max() + 1, rows.max() + 1])
        assert iou_bbox(box, box) == 1.0


# --- Label sets ---

def test_jaccard_examples():
    red = {f"F{f}C1" for f in range(1, 6)}
    green = {"F1C2", "F2C2", "F3C1", "F4C2", "F5C2"}
    assert jaccard(red, red) == 1.0
    assert jaccard(red, green) == pytest.approx(1 / 9)
    assert jaccard(red, {"X"}) == 0.0
    assert jaccard(set(), set()) == 0.0


def test_jaccard_distance_is_a_metric_on_random_triples():
    rng = np.random.default_rng(23)
    for _ in range(500):
        a, b, c = (set(rng.integers(0, 8, rng.integers(1, 6)).tolist()) for _ in range(3))
        assert jaccard(a, b) == pytest.approx(1 - jaccard_distance(a, b))
        assert jaccard_distance(a, c) <= jaccard_distance(a, b) + jaccard_distance(b, c) + 1e-12


def test_json_path_renders_error_locations():
    assert json_path(("plan", 0, "action")) == "$.plan[0].action"
    assert json_path((2, "bbox", 3)) == "$[2].bbox[3]"
    assert json_path(()) == "$"
