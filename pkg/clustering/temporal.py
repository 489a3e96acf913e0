# salient/clustering/temporal.py

import logging
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from geometry import jaccard_distance
from trackmodel import TrackSet

from .dbscan import NOISE, dbscan_matrix
from .params import ClusterParams
from .spatial import FrameClusterLabel, FrameClusterMap, spatial_cluster

logger = logging.getLogger(__name__)

DISCARDED = None


class ClusterTrack(BaseModel):
    model_config = ConfigDict(frozen=True)

    track_id: str
    seed_frame: int
    labels: FrozenSet[FrameClusterLabel]


class ObjectAssignment(BaseModel):
    """track_id -> object label in [0, label_count), or None (DISCARDED)."""
    model_config = ConfigDict(frozen=True)

    labels: Dict[str, Optional[int]]
    label_count: int

    @model_validator(mode="after")
    def _check_partition(self) -> "ObjectAssignment":
        used = {label for label in self.labels.values() if label is not None}
        if used != set(range(self.label_count)):
            raise ValueError(f"Object labels {sorted(used)} do not cover 0..{self.label_count - 1} exactly.")
        return self

    def members(self, label: int) -> List[str]:
        return sorted(tid for tid, lab in self.labels.items() if lab == label)

    def discarded(self) -> List[str]:
        return sorted(tid for tid, lab in self.labels.items() if lab is DISCARDED)


def build_cluster_tracks(ts: TrackSet, fcm: FrameClusterMap) -> List[ClusterTrack]:
    """One label set per track from its per-frame spatial clusters, in track_id order."""
    cluster_tracks = []
    for track in sorted(ts.tracks, key=lambda tr: tr.track_id):
        labels = set()
        for frame in track.frames():
            label = fcm.label_of(frame, track.track_id)
            if label is None:
                raise KeyError(f"Frame cluster map has no assignment for track '{track.track_id}' at frame {frame}.")
            labels.add(label)
        cluster_tracks.append(ClusterTrack(track_id=track.track_id, seed_frame=track.seed_frame, labels=frozenset(labels)))
    return cluster_tracks


def temporal_cluster(cluster_tracks: Sequence[ClusterTrack], params: ClusterParams) -> ObjectAssignment:
    """
    Group tracks whose label sets overlap (distance 1 - Jaccard) with DBSCAN.
    Noise tracks are DISCARDED; objects are numbered by earliest member seed
    frame, then by smallest member track_id.
    """
    ordered = sorted(cluster_tracks, key=lambda ct: ct.track_id)
    n = len(ordered)
    distances = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            distances[i, j] = distances[j, i] = jaccard_distance(ordered[i].labels, ordered[j].labels)
    raw = dbscan_matrix(distances, params.temporal_eps, params.temporal_min_size)

    groups: Dict[int, List[ClusterTrack]] = {}
    for ct, label in zip(ordered, raw):
        if label != NOISE:
            groups.setdefault(label, []).append(ct)
    canonical = sorted(
        groups.values(),
        key=lambda members: (min(m.seed_frame for m in members), min(m.track_id for m in members)),
    )
    labels: Dict[str, Optional[int]] = {ct.track_id: DISCARDED for ct in ordered}
    for object_label, members in enumerate(canonical):
        for ct in members:
            labels[ct.track_id] = object_label
    asg = ObjectAssignment(labels=labels, label_count=len(canonical))
    logger.info(f"Temporal clustering: {asg.label_count} objects, {len(asg.discarded())} tracks discarded.")
    return asg


class ConsolidationResult(NamedTuple):
    frame_clusters: FrameClusterMap
    cluster_tracks: List[ClusterTrack]
    assignment: ObjectAssignment


def consolidate_tracks(ts: TrackSet, params: Optional[ClusterParams] = None, threads: int = 1) -> ConsolidationResult:
    params = params or ClusterParams()
    fcm = spatial_cluster(ts, params, threads=threads)
    cluster_tracks = build_cluster_tracks(ts, fcm)
    return ConsolidationResult(fcm, cluster_tracks, temporal_cluster(cluster_tracks, params))
