"""
Track consolidation by two rounds of DBSCAN: boxes within each frame by IoU,
then whole tracks by the Jaccard overlap of the frame clusters they visit.
"""

from .dbscan import NOISE, dbscan, dbscan_matrix
from .params import ClusterConfigError, ClusterParams
from .spatial import FrameClusterLabel, FrameClusterMap, spatial_cluster, spatial_min_size
from .temporal import (
    DISCARDED, ClusterTrack, ConsolidationResult, ObjectAssignment,
    build_cluster_tracks, consolidate_tracks, temporal_cluster,
)

__all__ = [
    "DISCARDED", "NOISE",
    "ClusterConfigError", "ClusterParams", "ClusterTrack", "ConsolidationResult",
    "FrameClusterLabel", "FrameClusterMap", "ObjectAssignment",
    "build_cluster_tracks", "consolidate_tracks", "dbscan", "dbscan_matrix",
    "spatial_cluster", "spatial_min_size", "temporal_cluster",
]
