"""Health-check endpoint."""

from fastapi import APIRouter

from app.core.deps import Catalog

router = APIRouter(tags=["health"])


@router.get("/health")
async def health_check(catalog: Catalog) -> dict:
    """Return service status and the number of catalogued bounds."""
    return {"status": "ok", "bounds": len(catalog)}
