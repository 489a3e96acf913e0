"""
Plan skeletons from human videos: skill definitions, the planner prompt and
response schema, parsing, and parameter generation (Search insertion, MOD ids).
"""

from .backends import (
    HttpPlannerBackend, MockPlannerBackend, PlannerBackend, PlannerBackendError, PlanResult,
    generate_plan, get_backend, subsample_frames,
)
from .plans import (
    HOOKS, FullPlan, PlanExpansionError, PlanSchemaError, PlanStep, SemanticPlan,
    expand_plan, remap_mod_ids, rename_label, skip_step,
)
from .prompt import build_plan_model, build_prompt, build_schema, parse_plan, strip_code_fences
from .skills import DEFAULT_SKILLS_PATH, SemanticParam, SkillDefinition, SkillDefinitionError, load_skills, parse_skills

__all__ = [
    "DEFAULT_SKILLS_PATH", "HOOKS",
    "FullPlan", "HttpPlannerBackend", "MockPlannerBackend", "PlanExpansionError", "PlanResult",
    "PlanSchemaError", "PlanStep", "PlannerBackend", "PlannerBackendError", "SemanticParam", "SemanticPlan",
    "SkillDefinition", "SkillDefinitionError",
    "build_plan_model", "build_prompt", "build_schema", "expand_plan", "generate_plan", "get_backend",
    "load_skills", "parse_plan", "parse_skills", "remap_mod_ids", "rename_label", "skip_step", "strip_code_fences",
    "subsample_frames",
]
