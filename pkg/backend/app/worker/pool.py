"""Bounded process pool for independent solver runs."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(fn: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to every task; results come back in task order.

    ``workers <= 1`` runs in-process. Otherwise tasks go to a process pool, so
    ``fn`` must be a module-level function and tasks must pickle.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    workers = min(workers, len(tasks))
    logger.info("dispatching %d runs to %d worker processes", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, tasks))
