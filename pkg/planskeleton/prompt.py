# salient/planskeleton/prompt.py

import logging
import re
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Type, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, create_model

from geometry import json_path

from .plans import PlanSchemaError, PlanStep, SemanticPlan
from .skills import SkillDefinition, SkillDefinitionError, check_unique_names, human_inferable

logger = logging.getLogger(__name__)

PROMPT_TEMPLATE_PATH = Path(__file__).resolve().parent.parent / "templates" / "plan" / "semantic_plan_prompt.txt"
PLAN_DESCRIPTION = "A sequence of actions"
DISCRIMINATOR = "action"

_IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def _read_template() -> str:
    with open(PROMPT_TEMPLATE_PATH, "r", encoding="utf-8") as f:
        return f.read()


def build_prompt(skills: List[SkillDefinition]) -> str:
    """Render the video-planning prompt over the human-inferable skills, in definition order."""
    shown = human_inferable(skills)
    descriptions = ""
    for skill in shown:
        descriptions += f"- {skill.name}: {skill.description}\n"
        for param in skill.semantic_params:
            descriptions += f"  - {param.name}: {param.description}\n"
    return (
        _read_template()
        .replace("{skill_names}", " and ".join(f"{s.name.lower()}s" for s in shown))
        .replace("{skill_alternatives}", " or ".join(s.name.lower() for s in shown))
        .replace("{skill_descriptions}", descriptions)
    )


def _skill_model(skill: SkillDefinition) -> Type[BaseModel]:
    fields: Dict[str, Any] = {DISCRIMINATOR: (Literal[skill.name], ...)}
    for param in skill.semantic_params:
        if param.name == DISCRIMINATOR or not _IDENTIFIER.match(param.name):
            raise SkillDefinitionError(f"Skill '{skill.name}' has an unusable parameter name '{param.name}'.")
        if param.name in fields:
            raise SkillDefinitionError(f"Skill '{skill.name}' repeats parameter '{param.name}'.")
        fields[param.name] = (str, Field(description=param.description))
    return create_model(skill.name, __config__=ConfigDict(extra="forbid"), **fields)


def build_plan_model(skills: List[SkillDefinition]) -> Type[BaseModel]:
    """ActionPlan model: `plan` is a list whose items are one of the skill models, told apart by `action`."""
    check_unique_names(skills)
    models = [_skill_model(s) for s in human_inferable(skills)]
    if len(models) == 1:
        item: Any = models[0]
    else:
        item = Annotated[Union[tuple(models)], Field(discriminator=DISCRIMINATOR)]
    return create_model(
        "ActionPlan",
        __config__=ConfigDict(extra="forbid"),
        plan=(List[item], Field(description=PLAN_DESCRIPTION)),
    )


def build_schema(skills: List[SkillDefinition]) -> Dict[str, Any]:
    return build_plan_model(skills).model_json_schema()


def strip_code_fences(text: str) -> str:
    """Remove a markdown code fence wrapped around an LLM response."""
    if not text:
        return ""
    fence_pattern = re.compile(r"^\s*```(?:\w+\s*)?\n(.*?)\n\s*```\s*$", re.DOTALL)
    match = fence_pattern.match(text)
    if match:
        return match.group(1).strip()
    return text.strip()


def _error_path(loc: tuple, skill_names: set) -> str:
    # discriminated unions add the tag to the location; it is not part of the document
    kept = [p for i, p in enumerate(loc)
            if not (isinstance(p, str) and p in skill_names and i > 0 and isinstance(loc[i - 1], int))]
    return json_path(kept)


def parse_plan(response: str, skills: List[SkillDefinition]) -> SemanticPlan:
    """Validate a structured planner response against the schema built from the same skills."""
    model = build_plan_model(skills)
    try:
        parsed = model.model_validate_json(strip_code_fences(response))
    except ValidationError as e:
        first = e.errors()[0]
        path = _error_path(tuple(first["loc"]), {s.name for s in skills})
        raise PlanSchemaError(first["msg"], path=path) from e
    steps = []
    for item in parsed.plan:
        values = item.model_dump()
        skill = values.pop(DISCRIMINATOR)
        steps.append(PlanStep(skill=skill, params=values))
    logger.info(f"Parsed a semantic plan with {len(steps)} steps.")
    return SemanticPlan(steps=steps)
