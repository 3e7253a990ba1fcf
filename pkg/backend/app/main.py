"""FastAPI application factory and the default app instance."""

import logging
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app import __version__
from app.api.v1.router import router as v1_router
from app.core.config import settings
from app.core.logging import configure_logging
from app.modules.bench.bounds import BoundsCatalog

logger = logging.getLogger("app.startup")


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncIterator[None]:
    """Configure logging and load the bounds catalog."""
    configure_logging(settings.log_level)
    try:
        app.state.catalog = BoundsCatalog.load(settings.bounds_catalog)
        logger.info("Loaded %d bounds from %s", len(app.state.catalog), settings.bounds_catalog)
    except (OSError, ValueError) as exc:
        logger.warning("Could not load bounds catalog %s: %s", settings.bounds_catalog, exc)
        logger.warning("The server will start, but solve runs will not stop at known bounds.")
        app.state.catalog = BoundsCatalog()
    yield


def create_app() -> FastAPI:
    app = FastAPI(
        title="Job-shop solver",
        description="Tabu search with path relinking for job-shop scheduling",
        version=__version__,
        lifespan=lifespan,
    )

    # ── CORS ─────────────────────────────────────────────────────
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # tighten in production
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    # ── Routers ──────────────────────────────────────────────────
    app.include_router(v1_router)
    return app


app = create_app()
