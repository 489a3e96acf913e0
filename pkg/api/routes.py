# salient/api/routes.py

import hashlib
import logging
from typing import Any, Dict, List, Literal, Optional

from fastapi import APIRouter, HTTPException, Request  # type: ignore
from fastapi.responses import JSONResponse  # type: ignore
from pydantic import BaseModel, Field  # type: ignore
from starlette.concurrency import run_in_threadpool  # type: ignore

from clustering import ClusterParams, consolidate_tracks
from config import APP_VERSION, Settings, resolve_threads
from consolidation import assemble_dataset
from datasetio import dataset_to_coco, parse_detections, parse_groundtruth, unknown_category_ids
from evalmetrics import evaluate, report_to_json
from planskeleton import (
    PlannerBackendError, generate_plan, get_backend, load_skills, parse_skills, subsample_frames,
)
from planskeleton.backends import GEMINI_API_URL_BASE
from trackmodel import parse_trackset

logger = logging.getLogger(__name__)
router = APIRouter()

# --- Pydantic Models ---
class ConsolidateRequest(BaseModel):
    tracks: str; video_id: str = "tracks"; params: Dict[str, Any] = {}
class EvaluateRequest(BaseModel):
    detections: Any; groundtruth: Any; score_cutoff: Optional[float] = Field(default=None, ge=0.0, le=1.0)
class PlanRequest(BaseModel):
    skills: Optional[List[Dict[str, Any]]] = None; backend: Optional[Literal["mock", "http"]] = None
    mock_responses: List[str] = []; frame_count: int = Field(default=0, ge=0); fps: float = Field(default=30.0, gt=0)


def _settings(request: Request) -> Settings:
    return request.app.state.SETTINGS


def _raise_http(route: str, e: Exception) -> None:
    """Data errors are the client's (400), planner failures are upstream (502), the rest are ours (500)."""
    if isinstance(e, HTTPException):
        raise e
    if isinstance(e, PlannerBackendError):
        logger.error(f"API Route: planner backend error during {route}: {e}", exc_info=True)
        raise HTTPException(status_code=502, detail=f"Planner backend error: {e}")
    if isinstance(e, ValueError):
        logger.warning(f"API Route: rejected {route} request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    logger.error(f"API Route: error during {route}: {e}", exc_info=True)
    raise HTTPException(status_code=500, detail=f"Failed to process {route}: {e}")


# --- API Endpoint Definitions ---

@router.post("/consolidate", summary="Consolidate track JSONL into a salient-objects dataset")
async def consolidate_route(request: Request, payload: ConsolidateRequest):
    settings = _settings(request)
    logger.info(f"API Route: Received /consolidate request ({len(payload.tracks)} chars of tracks).")

    def _run() -> Dict[str, Any]:
        params = ClusterParams.model_validate({**settings.clustering.model_dump(), **payload.params})
        ts = parse_trackset(payload.tracks, source_name=payload.video_id)
        result = consolidate_tracks(ts, params, threads=resolve_threads(None, settings))
        source_sha256 = hashlib.sha256(payload.tracks.encode("utf-8")).hexdigest()
        ds = assemble_dataset(ts, result.assignment, params, source_sha256=source_sha256)
        return {
            "dataset": dataset_to_coco(ds),
            "summary": {
                "objects": result.assignment.label_count,
                "discarded": result.assignment.discarded(),
                "assignment": result.assignment.labels,
            },
        }

    try:
        return JSONResponse(content=await run_in_threadpool(_run))
    except Exception as e:
        _raise_http("/consolidate", e)


@router.post("/evaluate", summary="Score detections against ground truth")
async def evaluate_route(request: Request, payload: EvaluateRequest):
    settings = _settings(request)
    cutoff = payload.score_cutoff if payload.score_cutoff is not None else settings.evaluation.score_cutoff
    logger.info(f"API Route: Received /evaluate request (score cutoff {cutoff}).")

    def _run() -> Dict[str, Any]:
        dets = parse_detections(payload.detections, source="detections")
        gts, _ = parse_groundtruth(payload.groundtruth, source="groundtruth")
        unknown_category_ids(dets, gts)
        return report_to_json(evaluate(dets, gts, score_cutoff=cutoff))

    try:
        return JSONResponse(content=await run_in_threadpool(_run))
    except Exception as e:
        _raise_http("/evaluate", e)


@router.post("/plan", summary="Build the planner prompt and expand the returned plan skeleton")
async def plan_route(request: Request, payload: PlanRequest):
    settings = _settings(request)
    planner = settings.planner
    backend_name = payload.backend or planner.backend
    logger.info(f"API Route: Received /plan request for backend '{backend_name}'.")

    try:
        skills = parse_skills(payload.skills, source="skills") if payload.skills is not None else load_skills()
        backend = get_backend(
            backend_name, skills,
            api_key=planner.api_key or "", model=planner.model,
            endpoint=planner.endpoint or GEMINI_API_URL_BASE, timeout=planner.timeout,
            mock_responses=payload.mock_responses,
        )
        frames = subsample_frames(payload.frame_count, payload.fps, planner.sample_hz) if payload.frame_count else []
        result = await generate_plan(skills, backend, frames)
    except Exception as e:
        _raise_http("/plan", e)

    return JSONResponse(content={
        "prompt": result.prompt,
        "schema": result.schema,
        "semantic_plan": result.semantic.model_dump(),
        "full_plan": result.full.model_dump(),
        "skeleton": result.full.skeleton(),
    })


@router.get("/health", summary="Health check")
async def health_check_route():
    return {"status": "ok", "message": "API is healthy", "version": APP_VERSION}
