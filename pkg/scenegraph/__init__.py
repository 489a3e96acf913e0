"""Object-centric scene graph fed by gated, grouped and associated segmentation sightings."""

from .fitness import (
    FitnessParams, FrameFit, Observation, ObservationError, frame_fit, object_score, pixel_confidence,
)
from .graph import (
    AcceptanceGroup, Association, IntegrationEvent, LockConflictError, NodeNotFoundError, SceneGraph, SceneNode,
    associate, integrate, query,
)
from .stream import (
    ForgetDirective, GroupsDirective, LockDirective, apply, dump_graph, load_groups, load_observation_stream,
    parse_stream_line, replay,
)

__all__ = [
    "AcceptanceGroup", "Association", "FitnessParams", "ForgetDirective", "FrameFit", "GroupsDirective",
    "IntegrationEvent", "LockConflictError", "LockDirective", "NodeNotFoundError", "Observation",
    "ObservationError", "SceneGraph", "SceneNode",
    "apply", "associate", "dump_graph", "frame_fit", "integrate", "load_groups", "load_observation_stream",
    "object_score", "parse_stream_line", "pixel_confidence", "query", "replay",
]
