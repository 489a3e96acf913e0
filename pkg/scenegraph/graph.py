# salient/scenegraph/graph.py

import logging
import threading
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.spatial import KDTree

from .fitness import FitnessParams, Observation, frame_fit, object_score

logger = logging.getLogger(__name__)


class LockConflictError(ValueError):
    """Raised when a second node of a label is locked."""


class NodeNotFoundError(ValueError):
    pass


class AcceptanceGroup(BaseModel):
    """Labels that are only integrated together, when all were seen within `window` seconds."""
    model_config = ConfigDict(frozen=True)

    labels: FrozenSet[str]
    window: float = Field(default=0.0, ge=0.0)

    @field_validator("labels")
    @classmethod
    def _nonempty(cls, v: FrozenSet[str]) -> FrozenSet[str]:
        if not v:
            raise ValueError("An acceptance group needs at least one label.")
        return v


class SceneNode:
    """One object instance. Mutated only by SceneGraph under its write lock."""

    def __init__(self, node_id: int, obs: Observation):
        self.node_id = node_id
        self.label = obs.label
        self.seg_score = obs.seg_score
        self.sightings = 1
        self.points = np.asarray(obs.points, dtype=np.float64).reshape(-1, 3)
        self.supplied_pose: Optional[Tuple[float, ...]] = obs.pose
        self.locked = False
        self._tree: Optional[KDTree] = None

    @property
    def tree(self) -> KDTree:
        if self._tree is None:
            self._tree = KDTree(self.points)
        return self._tree

    @property
    def pose(self) -> List[float]:
        """The last supplied 6D pose, else the cloud centroid."""
        if self.supplied_pose is not None:
            return list(self.supplied_pose)
        return self.points.mean(axis=0).tolist()

    def merge(self, obs: Observation) -> None:
        self.sightings += 1
        self.seg_score = max(self.seg_score, obs.seg_score)
        self.points = np.vstack([self.points, np.asarray(obs.points, dtype=np.float64).reshape(-1, 3)])
        self._tree = None
        if obs.pose is not None:
            self.supplied_pose = obs.pose

    def overlap(self, points: np.ndarray, radius: float) -> float:
        """Fraction of `points` with a neighbor in this node's cloud within `radius` (inclusive)."""
        dists, _ = self.tree.query(points, k=1)
        return float(np.count_nonzero(dists <= radius)) / len(points)

    def to_dict(self, p: FitnessParams) -> Dict[str, Any]:
        return {
            "node_id": self.node_id,
            "label": self.label,
            "seg_score": self.seg_score,
            "sightings": self.sightings,
            "score": object_score(self, p),
            "point_count": int(self.points.shape[0]),
            "locked": self.locked,
            "pose": self.pose,
        }


class Association(NamedTuple):
    merge: bool
    node_id: Optional[int]  # target node for a merge
    overlap: float


class IntegrationEvent(NamedTuple):
    label: str
    timestamp: float
    outcome: str  # "rejected:seg", "rejected:pix", "buffered", "merged", "created"
    node_id: Optional[int] = None


class SceneGraph:
    """
    Object-centric store of accepted sightings. Writes (integrate, lock,
    unlock, forget, group toggling) serialize on one lock; reads work on a
    snapshot of the node list.
    """

    def __init__(self, params: Optional[FitnessParams] = None, groups: Sequence[AcceptanceGroup] = ()):
        self.params = params or FitnessParams()
        self.groups = list(groups)
        self.groups_enabled = True
        self._nodes: Dict[int, SceneNode] = {}
        self._next_id = 0
        self._write_lock = threading.RLock()
        # per-group buffer: label -> (arrival sequence, observation)
        self._buffers: List[Dict[str, Tuple[int, Observation]]] = [{} for _ in self.groups]
        self._arrivals = 0
        self.integrated_counts: Dict[str, int] = {}

    # --- Reads ---

    @property
    def nodes(self) -> List[SceneNode]:
        with self._write_lock:
            return sorted(self._nodes.values(), key=lambda n: n.node_id)

    def node(self, node_id: int) -> SceneNode:
        try:
            with self._write_lock:
                return self._nodes[node_id]
        except KeyError:
            raise NodeNotFoundError(f"No scene node with id {node_id}.") from None

    def nodes_for(self, label: str) -> List[SceneNode]:
        return [n for n in self.nodes if n.label == label]

    def associate(self, obs: Observation) -> Association:
        """Merge target among same-label nodes by nearest-neighbor overlap, or a new node."""
        candidates = self.nodes_for(obs.label)
        if not candidates or not obs.points:
            return Association(False, None, 0.0)
        points = np.asarray(obs.points, dtype=np.float64).reshape(-1, 3)
        best_id, best_overlap = None, -1.0
        for node in candidates:
            overlap = node.overlap(points, self.params.nn_radius)
            if overlap > best_overlap:
                best_id, best_overlap = node.node_id, overlap
        if best_overlap >= self.params.association_overlap_threshold:
            return Association(True, best_id, best_overlap)
        return Association(False, None, best_overlap)

    def query(self, label: str) -> Optional[SceneNode]:
        """The locked node for `label` if any, else the best-scoring one (lowest id on ties)."""
        candidates = self.nodes_for(label)
        if not candidates:
            return None
        for node in candidates:
            if node.locked:
                return node
        return max(candidates, key=lambda n: (object_score(n, self.params), -n.node_id))

    def dump(self) -> Dict[str, Any]:
        return {"nodes": [n.to_dict(self.params) for n in self.nodes]}

    # --- Writes ---

    def _commit(self, obs: Observation) -> IntegrationEvent:
        assoc = self.associate(obs)
        self.integrated_counts[obs.label] = self.integrated_counts.get(obs.label, 0) + 1
        if assoc.merge:
            node = self._nodes[assoc.node_id]
            node.merge(obs)
            logger.debug(f"t={obs.timestamp}: merged '{obs.label}' into node {node.node_id} (overlap {assoc.overlap:.2f})")
            return IntegrationEvent(obs.label, obs.timestamp, "merged", node.node_id)
        node = SceneNode(self._next_id, obs)
        self._nodes[node.node_id] = node
        self._next_id += 1
        logger.debug(f"t={obs.timestamp}: new node {node.node_id} for '{obs.label}'")
        return IntegrationEvent(obs.label, obs.timestamp, "created", node.node_id)

    def _group_index(self, label: str) -> Optional[int]:
        for i, group in enumerate(self.groups):
            if label in group.labels:
                return i
        return None

    def integrate(self, obs: Observation) -> List[IntegrationEvent]:
        """Gate, buffer and merge one observation. Returns what happened to each affected observation."""
        fit = frame_fit(obs, self.params)
        if not fit.accept:
            logger.debug(f"t={obs.timestamp}: rejected '{obs.label}' ({fit.reason})")
            return [IntegrationEvent(obs.label, obs.timestamp, f"rejected:{fit.reason}")]
        with self._write_lock:
            gi = self._group_index(obs.label) if self.groups_enabled else None
            if gi is None:
                return [self._commit(obs)]

            group, buffer = self.groups[gi], self._buffers[gi]
            buffer[obs.label] = (self._arrivals, obs)
            self._arrivals += 1
            for label in [lb for lb, (_, o) in buffer.items() if abs(obs.timestamp - o.timestamp) > group.window]:
                del buffer[label]
            times = [o.timestamp for _, o in buffer.values()]
            if set(buffer) != group.labels or max(times) - min(times) > group.window:
                return [IntegrationEvent(obs.label, obs.timestamp, "buffered")]
            ready = [o for _, o in sorted(buffer.values(), key=lambda item: item[0])]
            buffer.clear()
            return [self._commit(o) for o in ready]

    def lock(self, node_id: int) -> None:
        with self._write_lock:
            node = self.node(node_id)
            for other in self.nodes_for(node.label):
                if other.locked and other.node_id != node_id:
                    raise LockConflictError(
                        f"Node {other.node_id} already holds the lock for '{node.label}'; unlock it before locking node {node_id}."
                    )
            node.locked = True

    def unlock(self, node_id: int) -> None:
        with self._write_lock:
            self.node(node_id).locked = False

    def forget(self, label: str) -> int:
        """Drop every node and buffered observation of `label`. Returns the number of nodes removed."""
        with self._write_lock:
            doomed = [n.node_id for n in self.nodes_for(label)]
            for node_id in doomed:
                del self._nodes[node_id]
            for buffer in self._buffers:
                buffer.pop(label, None)
        logger.info(f"Forgot {len(doomed)} nodes labelled '{label}'.")
        return len(doomed)

    def set_groups_enabled(self, enabled: bool) -> None:
        with self._write_lock:
            self.groups_enabled = enabled
            if not enabled:
                for buffer in self._buffers:
                    buffer.clear()


def integrate(graph: SceneGraph, obs: Observation) -> SceneGraph:
    graph.integrate(obs)
    return graph


def associate(obs: Observation, graph: SceneGraph) -> Association:
    return graph.associate(obs)


def query(graph: SceneGraph, label: str) -> Optional[SceneNode]:
    return graph.query(label)
