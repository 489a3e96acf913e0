# salient/planskeleton/plans.py

import json
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from .skills import SkillDefinition, find_skill

logger = logging.getLogger(__name__)

SEARCH = "Search"


class PlanSchemaError(ValueError):
    """A planner response that does not fit the plan schema. `path` is a $-rooted JSON path."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class PlanExpansionError(ValueError):
    def __init__(self, message: str, step_index: Optional[int] = None):
        self.step_index = step_index
        prefix = f"step {step_index}: " if step_index is not None else ""
        super().__init__(f"{prefix}{message}")


class PlanStep(BaseModel):
    skill: str
    params: Dict[str, str] = {}
    nonsemantic: Dict[str, Any] = {}
    inserted: bool = False


class SemanticPlan(BaseModel):
    steps: List[PlanStep] = []

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2) + "\n"


def _render_value(value: Any) -> str:
    if isinstance(value, dict) and "mod_id" in value:
        return f"MOD_ID{value['mod_id']}"
    if isinstance(value, dict):
        return json.dumps(value.get("name", ""))
    return json.dumps(value)


class FullPlan(SemanticPlan):
    """A semantic plan after parameter generation: inserted skills and non-semantic values filled in."""

    def skeleton(self) -> List[str]:
        rendered = []
        for step in self.steps:
            if step.skill == SEARCH:
                args = [_render_value(obj) for obj in step.nonsemantic.get("objects", [])]
            elif "mod_id" in step.nonsemantic:
                args = [f"MOD_ID{step.nonsemantic['mod_id']}"]
            elif "place_name" in step.params:
                args = [json.dumps(step.params["place_name"])]
            else:
                args = [json.dumps(v) for v in step.params.values()]
            rendered.append(f"{step.skill}({', '.join(args)})")
        return rendered


# --- Parameter generation hooks ---
# A hook sees the demonstration frame indices, the whole (mutable) step list and the
# index of the step it was called for, and may edit any step or insert new ones.
Hook = Callable[[Optional[Sequence[int]], List[PlanStep], int], None]


def _search_objects(search: PlanStep) -> List[Dict[str, Any]]:
    return search.nonsemantic.setdefault("objects", [])


def _ensure_search(steps: List[PlanStep]) -> PlanStep:
    """The single Search step, inserted at the front when missing; extra Search steps are folded into the first."""
    searches = [s for s in steps if s.skill == SEARCH]
    if not searches:
        search = PlanStep(skill=SEARCH, nonsemantic={"objects": []}, inserted=True)
        steps.insert(0, search)
        return search
    first = searches[0]
    objects = _search_objects(first)
    for extra in searches[1:]:
        for obj in _search_objects(extra):
            if obj not in objects:
                objects.append(obj)
        steps.remove(extra)
    return first


def _add_search_object(search: PlanStep, obj: Dict[str, Any]) -> None:
    objects = _search_objects(search)
    if obj not in objects:
        objects.append(obj)


def _require_param(step: PlanStep, name: str) -> str:
    if name not in step.params:
        raise KeyError(f"{step.skill} step has no '{name}' parameter")
    return step.params[name]


def pick_hook(frames: Optional[Sequence[int]], steps: List[PlanStep], index: int) -> None:
    """Grasp order gives MOD ids: the first picked object is MOD_ID0 and so on."""
    step = steps[index]
    name = _require_param(step, "object_name")
    search = _ensure_search(steps)
    if "mod_id" not in step.nonsemantic:
        taken = [s.nonsemantic["mod_id"] for s in steps if s.skill == step.skill and "mod_id" in s.nonsemantic]
        step.nonsemantic["mod_id"] = max(taken) + 1 if taken else 0
    _add_search_object(search, {"name": name, "mod_id": step.nonsemantic["mod_id"]})


def place_hook(frames: Optional[Sequence[int]], steps: List[PlanStep], index: int) -> None:
    name = _require_param(steps[index], "place_name")
    _add_search_object(_ensure_search(steps), {"name": name})


def search_hook(frames: Optional[Sequence[int]], steps: List[PlanStep], index: int) -> None:
    _search_objects(steps[index])


HOOKS: Dict[str, Hook] = {"Pick": pick_hook, "Place": place_hook, SEARCH: search_hook}


def _check_steps(plan: SemanticPlan, skills: List[SkillDefinition]) -> None:
    for i, step in enumerate(plan.steps):
        skill = find_skill(skills, step.skill)
        if skill is None and step.skill == SEARCH and not step.params:
            continue  # inserted by expansion even when the skill set leaves Search out
        if skill is None:
            raise PlanExpansionError(f"skill '{step.skill}' is not defined", step_index=i)
        declared = {p.name for p in skill.semantic_params}
        if set(step.params) != declared:
            raise PlanExpansionError(
                f"{step.skill} expects parameters {sorted(declared)}, got {sorted(step.params)}", step_index=i
            )


def expand_plan(plan: SemanticPlan, skills: List[SkillDefinition], frames: Optional[Sequence[int]] = None,
                hooks: Optional[Dict[str, Hook]] = None) -> FullPlan:
    """Run each step's parameter-generation hook once, in plan order. Expanding twice changes nothing."""
    _check_steps(plan, skills)
    hooks = HOOKS if hooks is None else hooks
    steps = [s.model_copy(deep=True) for s in plan.steps]
    for original_index, step in enumerate(list(steps)):
        hook = hooks.get(step.skill)
        if hook is None:
            continue
        index = next((i for i, s in enumerate(steps) if s is step), None)
        if index is None:  # folded into another step by an earlier hook
            continue
        try:
            hook(frames, steps, index)
        except Exception as e:
            raise PlanExpansionError(f"{step.skill} parameter generation failed: {e}", step_index=original_index) from e
    full = FullPlan(steps=steps)
    logger.info(f"Expanded plan: {' '.join(full.skeleton())}")
    return full


# --- Operator edits ---

def skip_step(plan: FullPlan, index: int) -> FullPlan:
    if not 0 <= index < len(plan.steps):
        raise PlanExpansionError(f"no step at index {index}", step_index=index)
    steps = [s.model_copy(deep=True) for i, s in enumerate(plan.steps) if i != index]
    return FullPlan(steps=steps)


def rename_label(plan: FullPlan, old: str, new: str) -> FullPlan:
    """Replace an object or place name everywhere, Search objects included."""
    steps = [s.model_copy(deep=True) for s in plan.steps]
    for step in steps:
        step.params = {k: (new if v == old else v) for k, v in step.params.items()}
        for obj in step.nonsemantic.get("objects", []):
            if obj.get("name") == old:
                obj["name"] = new
    return FullPlan(steps=steps)


def remap_mod_ids(plan: FullPlan, mapping: Dict[int, int]) -> FullPlan:
    """Reassign MOD ids, e.g. when the detector split one grasped object into parts."""
    steps = [s.model_copy(deep=True) for s in plan.steps]
    for step in steps:
        if "mod_id" in step.nonsemantic:
            step.nonsemantic["mod_id"] = mapping.get(step.nonsemantic["mod_id"], step.nonsemantic["mod_id"])
        for obj in step.nonsemantic.get("objects", []):
            if "mod_id" in obj:
                obj["mod_id"] = mapping.get(obj["mod_id"], obj["mod_id"])
    return FullPlan(steps=steps)
