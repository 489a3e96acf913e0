# salient/clustering/spatial.py

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from geometry import boxes_to_array, iou_bbox, iou_mask, iou_matrix
from trackmodel import TrackEntry, TrackSet, boxes_at_frame, index_by_frame

from .dbscan import NOISE, dbscan_matrix
from .params import ClusterConfigError, ClusterParams

logger = logging.getLogger(__name__)


class FrameClusterLabel(NamedTuple):
    """A frame-qualified spatial cluster label. Noise labels carry their track id so no two tracks share one."""
    frame: int
    cluster: int
    track_id: str = ""

    @property
    def is_noise(self) -> bool:
        return self.cluster == NOISE

    def __str__(self) -> str:
        if self.is_noise:
            return f"F{self.frame}N[{self.track_id}]"
        return f"F{self.frame}C{self.cluster}"


class FrameClusterMap(BaseModel):
    """frame -> {track_id -> cluster id or NOISE}, for every frame holding at least one box."""
    model_config = ConfigDict(frozen=True)

    frames: Dict[int, Dict[str, int]] = {}

    def label_of(self, frame: int, track_id: str) -> Optional[FrameClusterLabel]:
        cluster = self.frames.get(frame, {}).get(track_id)
        if cluster is None:
            return None
        return FrameClusterLabel(frame, cluster, track_id if cluster == NOISE else "")

    def cluster_count(self, frame: int) -> int:
        return len({c for c in self.frames.get(frame, {}).values() if c != NOISE})


def spatial_min_size(ts: TrackSet, t: int, params: Optional[ClusterParams] = None) -> int:
    """Minimum DBSCAN cluster size for frame t: max(1, floor(boxes / (2 * seeds))) or the fixed override."""
    if params is not None and params.spatial_min_size_policy == "fixed":
        return params.spatial_min_size  # type: ignore[return-value]
    if not ts.seeds:
        raise ClusterConfigError(
            f"Track set '{ts.video_id}' has no seed masks, so the per-frame minimum cluster size cannot be "
            "derived. Use spatial_min_size_policy 'fixed' with an explicit spatial_min_size."
        )
    return _formula_min_size(len(boxes_at_frame(ts, t)), len(ts.seeds))


def _formula_min_size(box_count: int, seed_count: int) -> int:
    return max(1, box_count // (2 * seed_count))


def _distance_matrix(entries: List[Tuple[str, TrackEntry]], metric: str) -> np.ndarray:
    boxes = boxes_to_array(entry.bbox for _, entry in entries)
    iou = iou_matrix(boxes, boxes)
    if metric == "mask_iou":
        n = len(entries)
        for i in range(n):
            for j in range(i + 1, n):
                a, b = entries[i][1], entries[j][1]
                if a.mask is not None and b.mask is not None:
                    iou[i, j] = iou[j, i] = iou_mask(a.mask, b.mask)
                else:
                    iou[i, j] = iou[j, i] = iou_bbox(a.bbox, b.bbox)
    distances = 1.0 - iou
    np.fill_diagonal(distances, 0.0)
    return distances


def _cluster_frame(ts: TrackSet, frame: int, entries: List[Tuple[str, TrackEntry]],
                   params: ClusterParams) -> Dict[str, int]:
    if params.spatial_min_size_policy == "fixed":
        min_samples = params.spatial_min_size
    else:
        min_samples = _formula_min_size(len(entries), len(ts.seeds))
    labels = dbscan_matrix(_distance_matrix(entries, params.spatial_metric), params.spatial_eps, min_samples)
    assignment = {track_id: label for (track_id, _), label in zip(entries, labels)}
    logger.debug(
        f"Frame {frame}: {len(entries)} boxes, min size {min_samples}, "
        f"{len(set(labels) - {NOISE})} clusters, {labels.count(NOISE)} noise"
    )
    return assignment


def spatial_cluster(ts: TrackSet, params: ClusterParams, threads: int = 1) -> FrameClusterMap:
    """Run DBSCAN over each frame's boxes with distance 1 - IoU. Frames are independent and may run in parallel."""
    if params.spatial_min_size_policy == "seed_scaled" and not ts.seeds and ts.tracks:
        spatial_min_size(ts, 0, params)  # raises the configuration error up front
    index = index_by_frame(ts)
    frames = list(index.keys())
    if threads > 1 and len(frames) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda f: _cluster_frame(ts, f, index[f], params), frames))
    else:
        results = [_cluster_frame(ts, f, index[f], params) for f in frames]
    fcm = FrameClusterMap(frames=dict(zip(frames, results)))
    logger.info(f"Spatial clustering done over {len(frames)} frames ({params.spatial_metric}, eps {params.spatial_eps}).")
    return fcm
