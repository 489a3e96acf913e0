# salient/synth/config.py

import logging
from pathlib import Path
from typing import List, Literal, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

logger = logging.getLogger(__name__)

# Every object gets its own horizontal lane at least this many pixels tall.
MIN_LANE_HEIGHT = 16


class SynthConfigError(ValueError):
    pass


class Occlusion(BaseModel):
    """Frames [start, end) during which one object produces no boxes."""
    model_config = ConfigDict(frozen=True)
    object_index: int = Field(ge=0); start: int = Field(ge=0); end: int = Field(ge=0)


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    object_count: int = Field(default=2, ge=1)
    frame_count: int = Field(default=60, ge=2)
    width: int = Field(default=640, ge=32)
    height: int = Field(default=480, ge=16)
    seeds_per_object: int = Field(default=2, ge=1)
    jitter: float = Field(default=0.0, ge=0.0)
    jitter_min_iou: float = Field(default=0.6, gt=0.0, le=1.0)
    spurious_track_count: int = Field(default=0, ge=0)
    spurious_max_length: int = Field(default=3, ge=1)
    occlusions: List[Occlusion] = []
    masks: bool = True
    seed: int = Field(default=0, ge=0)
    preset: Literal["random", "canonical"] = "random"

    @model_validator(mode="after")
    def _check_layout(self) -> "SynthConfig":
        if self.height // self.object_count < MIN_LANE_HEIGHT:
            raise ValueError(
                f"{self.object_count} objects need a canvas at least {self.object_count * MIN_LANE_HEIGHT}px tall."
            )
        for occ in self.occlusions:
            if occ.object_index >= self.object_count:
                raise ValueError(f"Occlusion names object {occ.object_index} but there are {self.object_count}.")
            if occ.end <= occ.start:
                raise ValueError(f"Occlusion [{occ.start}, {occ.end}) is empty.")
        return self

    def occluded(self, object_index: int, frame: int) -> bool:
        return any(o.object_index == object_index and o.start <= frame < o.end for o in self.occlusions)


def load_synth_config(path: Union[str, Path]) -> SynthConfig:
    """Read a flat `key: value` YAML file."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise SynthConfigError(f"{path}: not valid YAML ({e})") from e
    if not isinstance(raw, dict):
        raise SynthConfigError(f"{path}: expected key: value lines, got {type(raw).__name__}.")
    try:
        return SynthConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "config"
        raise SynthConfigError(f"{path}: {key}: {first['msg']}") from e
