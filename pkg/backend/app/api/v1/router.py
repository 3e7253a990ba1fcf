"""API v1 router: aggregates the sub-routers."""

from fastapi import APIRouter

from app.api.v1 import health, solve

router = APIRouter(prefix="/api/v1")

router.include_router(health.router)
router.include_router(solve.router)
