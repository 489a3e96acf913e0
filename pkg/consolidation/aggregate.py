# salient/consolidation/aggregate.py

from typing import Sequence

import numpy as np

from geometry import BitMask, MaskShapeError


class AggregationError(ValueError):
    """Raised when masks or assignments cannot be combined into dataset items."""


def vote_threshold(n: int) -> int:
    """Votes a pixel needs out of n masks: at least half, rounded up."""
    return (n + 1) // 2


def aggregate_masks(masks: Sequence[BitMask]) -> BitMask:
    """Keep the pixels set in at least half of the masks. The result may be empty."""
    if not masks:
        raise AggregationError("aggregate_masks needs at least one mask.")
    shape = masks[0].shape
    for mask in masks[1:]:
        if mask.shape != shape:
            raise MaskShapeError(f"Cannot aggregate masks of sizes {shape[1]}x{shape[0]} and {mask.width}x{mask.height}.")
    if len(masks) == 1:
        return masks[0]
    votes = np.zeros(shape, dtype=np.int32)
    for mask in masks:
        votes += mask.to_array()
    return BitMask.from_array(votes >= vote_threshold(len(masks)))
