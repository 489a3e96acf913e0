# salient/planskeleton/backends.py

import json
import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

import aiohttp

from .plans import FullPlan, SemanticPlan, expand_plan
from .prompt import build_prompt, build_schema, parse_plan
from .skills import SkillDefinition, human_inferable

logger = logging.getLogger(__name__)

GEMINI_API_URL_BASE = "https://generativelanguage.googleapis.com/v1beta/models/"


class PlannerBackendError(RuntimeError):
    """The semantic planner could not be reached or returned nothing usable."""


def subsample_frames(frame_count: int, fps: float, hz: float = 2.0) -> List[int]:
    """Frame indices sampled at roughly `hz` from a video recorded at `fps`."""
    if fps <= 0 or hz <= 0:
        raise ValueError(f"fps and hz must be positive, got fps={fps}, hz={hz}.")
    if frame_count <= 0:
        return []
    step = max(1.0, fps / hz)
    indices = []
    k = 0
    while True:
        index = int(math.floor(k * step))
        if index >= frame_count:
            break
        indices.append(index)
        k += 1
    return indices


class PlannerBackend(ABC):
    name = "abstract"

    @abstractmethod
    async def generate(self, prompt: str, schema: Dict[str, Any], frame_indices: Sequence[int]) -> str:
        """Return the raw structured response text for a prompt and response schema."""


class MockPlannerBackend(PlannerBackend):
    """Replays canned responses in order; without any, answers one step per human-inferable skill."""
    name = "mock"

    def __init__(self, skills: List[SkillDefinition], responses: Optional[List[str]] = None):
        self.skills = skills
        self.responses = list(responses or [])
        self.calls = 0

    def _synthesize(self) -> str:
        plan = []
        for skill in human_inferable(self.skills):
            step = {"action": skill.name}
            step.update({p.name: f"<{p.name}>" for p in skill.semantic_params})
            plan.append(step)
        return json.dumps({"plan": plan})

    async def generate(self, prompt: str, schema: Dict[str, Any], frame_indices: Sequence[int]) -> str:
        self.calls += 1
        if self.responses:
            return self.responses[(self.calls - 1) % len(self.responses)]
        return self._synthesize()


class HttpPlannerBackend(PlannerBackend):
    """POSTs the prompt and the response JSON schema to a generateContent-style endpoint."""
    name = "http"

    def __init__(self, api_key: str, model: str, endpoint: str = GEMINI_API_URL_BASE, timeout: float = 300.0,
                 temperature: float = 0.2):
        self.api_key = api_key
        self.model = model
        self.endpoint = endpoint
        self.timeout = timeout
        self.temperature = temperature

    def payload(self, prompt: str, schema: Dict[str, Any], frame_indices: Sequence[int]) -> Dict[str, Any]:
        frames_note = f"Video frames sampled at indices: {', '.join(str(i) for i in frame_indices)}"
        return {
            "contents": [{"role": "user", "parts": [{"text": prompt}, {"text": frames_note}]}],
            "generationConfig": {
                "temperature": self.temperature,
                "responseMimeType": "application/json",
                "responseJsonSchema": schema,
            },
        }

    async def generate(self, prompt: str, schema: Dict[str, Any], frame_indices: Sequence[int]) -> str:
        if not self.api_key:
            raise PlannerBackendError("Planner API key is not configured (set SALIENT_PLANNER_API_KEY).")
        api_url = f"{self.endpoint}{self.model}:generateContent?key={self.api_key}"
        logger.info(f"Calling planner API ({self.model})... Prompt length: {len(prompt)} chars, {len(frame_indices)} frames.")
        try:
            async with aiohttp.ClientSession() as session:
                async with session.post(
                    api_url, json=self.payload(prompt, schema, frame_indices),
                    headers={"Content-Type": "application/json"},
                    timeout=aiohttp.ClientTimeout(total=self.timeout),
                ) as response:
                    response_text = await response.text()
                    if response.status != 200:
                        logger.error(f"Planner API call failed with status {response.status}: {response_text[:1000]}...")
                        raise PlannerBackendError(f"Planner API call failed with status {response.status}.")
                    result = json.loads(response_text)
        except PlannerBackendError:
            raise
        except Exception as e:
            logger.error(f"An unexpected error occurred during the planner API call: {e}", exc_info=True)
            raise PlannerBackendError(f"Planner API call failed: {e}") from e

        if (candidates := result.get("candidates")) and isinstance(candidates, list):
            if (parts := candidates[0].get("content", {}).get("parts")) and isinstance(parts, list):
                return parts[0].get("text", "")
        logger.error(f"Unexpected planner API response structure: {result}")
        raise PlannerBackendError("Unexpected planner API response structure.")


def get_backend(name: str, skills: List[SkillDefinition], *, api_key: str = "", model: str = "",
                endpoint: str = GEMINI_API_URL_BASE, timeout: float = 300.0,
                mock_responses: Optional[List[str]] = None) -> PlannerBackend:
    if name == "mock":
        return MockPlannerBackend(skills, mock_responses)
    if name == "http":
        return HttpPlannerBackend(api_key=api_key, model=model, endpoint=endpoint, timeout=timeout)
    raise ValueError(f"Unknown planner backend '{name}' (expected 'mock' or 'http').")


class PlanResult(NamedTuple):
    prompt: str
    schema: Dict[str, Any]
    semantic: SemanticPlan
    full: FullPlan


async def generate_plan(skills: List[SkillDefinition], backend: PlannerBackend,
                        frame_indices: Sequence[int] = ()) -> PlanResult:
    """Prompt the backend, validate its answer and expand it into a full plan."""
    prompt = build_prompt(skills)
    schema = build_schema(skills)
    response = await backend.generate(prompt, schema, frame_indices)
    semantic = parse_plan(response, skills)
    return PlanResult(prompt, schema, semantic, expand_plan(semantic, skills, frames=frame_indices))
