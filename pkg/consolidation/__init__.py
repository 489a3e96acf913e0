"""Majority-vote mask aggregation and assembly of the salient-objects dataset."""

from .aggregate import AggregationError, aggregate_masks, vote_threshold
from .dataset import SalientDataset, SalientItem, assemble_dataset, split_dataset
from .overlays import label_color, render_overlays

__all__ = [
    "AggregationError", "SalientDataset", "SalientItem",
    "aggregate_masks", "assemble_dataset", "label_color", "render_overlays", "split_dataset", "vote_threshold",
]
