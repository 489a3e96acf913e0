# salient/planskeleton/skills.py

import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from geometry import json_path

logger = logging.getLogger(__name__)

DEFAULT_SKILLS_PATH = Path(__file__).resolve().parent.parent / "templates" / "skills" / "default_skills.json"


class SkillDefinitionError(ValueError):
    pass


class SemanticParam(BaseModel):
    model_config = ConfigDict(frozen=True)
    name: str; description: str


class SkillDefinition(BaseModel):
    """A robot skill: whether a human video can show it, its name, description and parameters."""
    model_config = ConfigDict(frozen=True)

    human_inferable: bool
    name: str = Field(min_length=1)
    description: str = ""
    semantic_params: List[SemanticParam] = []
    nonsemantic_params: List[str] = []


_SkillList = TypeAdapter(List[SkillDefinition])


def check_unique_names(skills: List[SkillDefinition]) -> None:
    seen = set()
    for skill in skills:
        if skill.name in seen:
            raise SkillDefinitionError(f"Skill name '{skill.name}' is defined more than once.")
        seen.add(skill.name)


def human_inferable(skills: List[SkillDefinition]) -> List[SkillDefinition]:
    selected = [s for s in skills if s.human_inferable]
    if not selected:
        raise SkillDefinitionError("No human-inferable skills; a video prompt needs at least one.")
    return selected


def find_skill(skills: List[SkillDefinition], name: str) -> Optional[SkillDefinition]:
    return next((s for s in skills if s.name == name), None)


def parse_skills(payload: Any, source: str = "skills") -> List[SkillDefinition]:
    try:
        skills = _SkillList.validate_python(payload)
    except ValidationError as e:
        first = e.errors()[0]
        raise SkillDefinitionError(f"{source}: {json_path(first['loc'])}: {first['msg']}") from e
    check_unique_names(skills)
    return skills


def load_skills(path: Union[str, Path, None] = None) -> List[SkillDefinition]:
    """Read a JSON array of skill definitions; the bundled Search / Place / Pick set by default."""
    path = Path(path) if path is not None else DEFAULT_SKILLS_PATH
    with open(path, "r", encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise SkillDefinitionError(f"{path}: not valid JSON ({e.msg})") from e
    skills = parse_skills(payload, source=str(path))
    logger.info(f"Loaded {len(skills)} skills from {path}")
    return skills
