# salient/scenegraph/stream.py

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Iterable, List, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from geometry import json_path

from .fitness import FitnessParams, Observation, ObservationError
from .graph import AcceptanceGroup, IntegrationEvent, SceneGraph

logger = logging.getLogger(__name__)


# --- Directive lines ---
class LockDirective(BaseModel):
    directive: Literal["lock", "unlock"]; node_id: int

class ForgetDirective(BaseModel):
    directive: Literal["forget"]; label: str

class GroupsDirective(BaseModel):
    directive: Literal["groups"]; enabled: bool

Directive = Annotated[Union[LockDirective, ForgetDirective, GroupsDirective], Field(discriminator="directive")]
StreamItem = Union[Observation, LockDirective, ForgetDirective, GroupsDirective]

_DirectiveAdapter = TypeAdapter(Directive)
_GroupsAdapter = TypeAdapter(List[AcceptanceGroup])


def _loc(e: ValidationError) -> str:
    first = e.errors()[0]
    return f"{json_path(first['loc'])}: {first['msg']}"


def parse_stream_line(text: str, line_no: int = 0) -> StreamItem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ObservationError(f"line {line_no}: not valid JSON ({e.msg})") from e
    try:
        if isinstance(raw, dict) and "directive" in raw:
            return _DirectiveAdapter.validate_python(raw)
        return Observation.model_validate(raw)
    except ValidationError as e:
        raise ObservationError(f"line {line_no}: {_loc(e)}") from e


def load_observation_stream(path: Union[str, Path]) -> List[StreamItem]:
    items: List[StreamItem] = []
    last_t: Optional[float] = None
    with open(path, "r", encoding="utf-8") as f:
        for line_no, text in enumerate(f, start=1):
            if not text.strip():
                continue
            item = parse_stream_line(text, line_no)
            if isinstance(item, Observation):
                if last_t is not None and item.timestamp < last_t:
                    logger.warning(f"{path} line {line_no}: timestamp {item.timestamp} goes back from {last_t}.")
                last_t = item.timestamp
            items.append(item)
    logger.info(f"Loaded {len(items)} stream lines from {path}")
    return items


def load_groups(path: Union[str, Path]) -> List[AcceptanceGroup]:
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    try:
        return _GroupsAdapter.validate_python(payload)
    except ValidationError as e:
        raise ObservationError(f"{path}: {_loc(e)}") from e


def apply(graph: SceneGraph, item: StreamItem) -> List[IntegrationEvent]:
    if isinstance(item, Observation):
        return graph.integrate(item)
    if isinstance(item, LockDirective):
        (graph.lock if item.directive == "lock" else graph.unlock)(item.node_id)
    elif isinstance(item, ForgetDirective):
        graph.forget(item.label)
    else:
        graph.set_groups_enabled(item.enabled)
    return []


def replay(items: Iterable[StreamItem], params: Optional[FitnessParams] = None,
           groups: Iterable[AcceptanceGroup] = ()) -> SceneGraph:
    """Build a graph by applying a stream in order."""
    graph = SceneGraph(params, list(groups))
    events = 0
    for item in items:
        events += len(apply(graph, item))
    logger.info(f"Replayed stream: {events} observation events, {len(graph.nodes)} nodes.")
    return graph


def dump_graph(graph: SceneGraph, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(graph.dump(), indent=2) + "\n")
