import logging
import os

from fastapi import FastAPI  # type: ignore
from starlette.middleware.cors import CORSMiddleware  # type: ignore

from api import routes as api_routes
from config import APP_VERSION, load_settings

# --- Logging Setup ---
logging.basicConfig(
    level=os.getenv("SALIENT_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)

# --- Application Initialization ---
app = FastAPI(
    title="Salient Objects API",
    version=APP_VERSION,
    description="Consolidates grasp tracks into salient-object datasets, scores detections and expands plan skeletons.",
)

# --- Store configuration in app.state for access in route handlers ---
app.state.SETTINGS = load_settings(os.getenv("SALIENT_SETTINGS") or None)

# --- Middleware ---
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # In production, restrict this to the calling tools' origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
async def startup_event():
    logger.info(f"Application startup: salient {APP_VERSION}, planner backend '{app.state.SETTINGS.planner.backend}'.")
    logger.info("API routes are loaded from api.routes module and prefixed with /api")


app.include_router(api_routes.router, prefix="/api")


@app.get("/health", include_in_schema=False)
def root_health_check():
    return {"status": "ok", "message": "Salient objects service is running."}


if __name__ == "__main__":
    import uvicorn  # type: ignore
    logger.info("Starting Uvicorn server (http://localhost:8000)...")
    uvicorn.run("engine:app", host="0.0.0.0", port=8000, reload=True, reload_dirs=["."])
