"""Synthetic multi-seed track scenes with known ground truth, and partition scoring against it."""

from .config import MIN_LANE_HEIGHT, Occlusion, SynthConfig, SynthConfigError, load_synth_config
from .generator import SPURIOUS, GroundTruth, canonical_scene, crossing_scene, generate, jitter_box
from .scoring import CoverageError, PartitionScore, score_partition

__all__ = [
    "MIN_LANE_HEIGHT", "SPURIOUS",
    "CoverageError", "GroundTruth", "Occlusion", "PartitionScore", "SynthConfig", "SynthConfigError",
    "canonical_scene", "crossing_scene", "generate", "jitter_box", "load_synth_config", "score_partition",
]
