# salient/config.py

import logging
import os
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from clustering import ClusterParams
from scenegraph import FitnessParams

logger = logging.getLogger(__name__)

APP_VERSION = "1.0.0"

BASE_DIR = Path(__file__).resolve().parent
DEFAULT_SETTINGS_PATH = BASE_DIR / "config" / "salient.yaml"


class SettingsError(ValueError):
    pass


class EvaluationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    score_cutoff: float = Field(default=0.5, ge=0.0, le=1.0)


class PlannerSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    backend: Literal["mock", "http"] = "mock"
    endpoint: Optional[str] = None
    model: str = "gemini-2.5-flash"
    timeout: float = Field(default=120.0, gt=0)
    sample_hz: float = Field(default=2.0, gt=0)
    api_key: Optional[str] = Field(default=None, exclude=True)


class RuntimeSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    threads: int = Field(default=0, ge=0)


class Settings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    clustering: ClusterParams = ClusterParams()
    evaluation: EvaluationSettings = EvaluationSettings()
    scenegraph: FitnessParams = FitnessParams()
    planner: PlannerSettings = PlannerSettings()
    runtime: RuntimeSettings = RuntimeSettings()


def _apply_env(raw: dict) -> dict:
    threads = os.getenv("SALIENT_THREADS")
    if threads is not None and threads.strip():
        try:
            raw.setdefault("runtime", {})["threads"] = int(threads)
        except ValueError as e:
            raise SettingsError(f"SALIENT_THREADS must be an integer, got '{threads}'.") from e
    planner = raw.setdefault("planner", {})
    for env_name, key in (("SALIENT_PLANNER_ENDPOINT", "endpoint"), ("SALIENT_PLANNER_MODEL", "model")):
        value = os.getenv(env_name)
        if value:
            planner[key] = value
    if "api_key" in planner:
        raise SettingsError("The planner API key is read from SALIENT_PLANNER_API_KEY only, not from the settings file.")
    api_key = os.getenv("SALIENT_PLANNER_API_KEY")
    if api_key:
        planner["api_key"] = api_key
    return raw


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """Defaults from config/salient.yaml (or `path`), then `.env`, then SALIENT_* environment overrides."""
    load_dotenv(dotenv_path=BASE_DIR / ".env")
    settings_path = Path(path) if path is not None else DEFAULT_SETTINGS_PATH
    raw: dict = {}
    if settings_path.exists():
        with open(settings_path, "r", encoding="utf-8") as f:
            try:
                raw = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise SettingsError(f"{settings_path}: not valid YAML ({e})") from e
        if not isinstance(raw, dict):
            raise SettingsError(f"{settings_path}: expected a mapping of sections.")
    elif path is not None:
        raise SettingsError(f"Settings file not found: {settings_path}")
    else:
        logger.warning(f"Settings file {settings_path} not found; using built-in defaults.")

    try:
        settings = Settings.model_validate(_apply_env(raw))
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"])
        raise SettingsError(f"{settings_path}: {key}: {first['msg']}") from e
    logger.debug(f"Settings loaded from {settings_path}")
    return settings


def resolve_threads(requested: Optional[int], settings: Optional[Settings] = None) -> int:
    """0 (or nothing) means one worker per CPU."""
    threads = requested if requested is not None else (settings.runtime.threads if settings else 0)
    if threads < 0:
        raise SettingsError(f"Thread count must be >= 0, got {threads}.")
    return threads or (os.cpu_count() or 1)
