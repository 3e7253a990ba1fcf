"""Solve and check endpoints: upload an instance, get a schedule back."""

import random
from typing import Annotated

from fastapi import APIRouter, Form, UploadFile
from fastapi.concurrency import run_in_threadpool
from pydantic import BaseModel

from app.core.config import settings
from app.core.deps import Catalog, read_instance, unprocessable
from app.core.errors import SchedulingError
from app.modules.bench.parsers import parse_solution
from app.modules.scheduling.evolve import evolve_run
from app.modules.scheduling.graph import evaluate
from app.modules.scheduling.monitor import make_clock
from app.modules.scheduling.params import EvolveConfig

router = APIRouter(tags=["solver"])


# ── Schemas ──────────────────────────────────────────────────────


class SolveResponse(BaseModel):
    instance: str
    makespan: int
    time_to_best: float
    feasible: bool
    machines: list[list[int]]
    relinks: int
    repairs: int


class CheckResponse(BaseModel):
    feasible: bool
    makespan: int | None


# ── Endpoints ────────────────────────────────────────────────────


@router.post("/solve", response_model=SolveResponse)
async def solve(
    file: UploadFile,
    catalog: Catalog,
    format: Annotated[str, Form()] = "auto",
    time_limit: Annotated[float, Form(gt=0)] = 10.0,
    seed: Annotated[int, Form()] = 0,
    lb: Annotated[int | None, Form(gt=0)] = None,
) -> SolveResponse:
    """Run the solver on an uploaded instance for at most ``api_max_time_limit`` seconds."""
    inst = await read_instance(file, format)
    if lb is None and (entry := catalog.get(inst.name)) is not None:
        lb = entry.lb
    budget = min(time_limit, settings.api_max_time_limit)
    try:
        result = await run_in_threadpool(
            evolve_run,
            inst,
            EvolveConfig(),
            budget,
            random.Random(seed),
            lb,
            clock=make_clock(settings.clock, settings.work_rate),
            seed=seed,
        )
    except SchedulingError as exc:
        raise unprocessable(exc) from exc

    return SolveResponse(
        instance=inst.name,
        makespan=result.evaluation.makespan,
        time_to_best=result.stats.time_to_best,
        feasible=result.evaluation.feasible,
        machines=result.best.to_lists(),
        relinks=result.stats.relinks,
        repairs=result.stats.repairs,
    )


@router.post("/check", response_model=CheckResponse)
async def check(
    file: UploadFile,
    solution: UploadFile,
    format: Annotated[str, Form()] = "auto",
) -> CheckResponse:
    """Re-evaluate an uploaded solution file against its instance."""
    inst = await read_instance(file, format)
    raw = await solution.read()
    try:
        sol = parse_solution(raw.decode("utf-8", errors="replace"), inst)
    except SchedulingError as exc:
        raise unprocessable(exc) from exc
    ev = evaluate(inst, sol)
    return CheckResponse(feasible=ev.feasible, makespan=ev.makespan if ev.feasible else None)
