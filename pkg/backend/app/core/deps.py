"""Request dependencies shared by the v1 routers."""

from typing import Annotated, cast

from fastapi import Depends, HTTPException, Request, UploadFile, status

from app.core.errors import SchedulingError
from app.modules.bench.bounds import BoundsCatalog
from app.modules.bench.parsers import FORMATS, InstanceFormat, parse_instance
from app.modules.scheduling.model import Instance


def get_catalog(request: Request) -> BoundsCatalog:
    """Bounds catalog loaded by the lifespan hook; empty if it could not be read."""
    return getattr(request.app.state, "catalog", None) or BoundsCatalog()


Catalog = Annotated[BoundsCatalog, Depends(get_catalog)]


def unprocessable(exc: Exception) -> HTTPException:
    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))


async def read_instance(file: UploadFile, fmt: str) -> Instance:
    """Parse an uploaded instance file, or raise 422."""
    if fmt not in FORMATS:
        raise unprocessable(ValueError(f"unsupported format {fmt!r}, expected one of {FORMATS}"))
    raw = await file.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise unprocessable(ValueError("instance file must be utf-8 text")) from exc
    name = (file.filename or "instance").rsplit("/", 1)[-1].split(".", 1)[0]
    try:
        return parse_instance(text, cast(InstanceFormat, fmt), name=name)
    except SchedulingError as exc:
        raise unprocessable(exc) from exc
