from pathlib import Path

import pytest

from planskeleton import SemanticParam, SkillDefinition, load_skills
from synth import canonical_scene

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def canonical():
    """The two-object crossing scene: (TrackSet, GroundTruth)."""
    return canonical_scene()


@pytest.fixture
def canonical_tracks(canonical):
    return canonical[0]


@pytest.fixture
def default_skills():
    return load_skills()


@pytest.fixture
def pick_place_skills():
    return [s for s in load_skills() if s.human_inferable]


@pytest.fixture
def bare_skill():
    return SkillDefinition(human_inferable=True, name="Wave", description="Wave at the camera.")


@pytest.fixture
def two_param_skill():
    return SkillDefinition(
        human_inferable=True, name="Pour", description="Pour from one container into another.",
        semantic_params=[
            SemanticParam(name="source", description="The container poured from"),
            SemanticParam(name="target", description="The container poured into"),
        ],
    )
