"""Bounded worker pool whose results come back in submission order."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

A = TypeVar("A")
B = TypeVar("B")


def run_jobs(fn: Callable[[A], B], jobs: Iterable[A], workers: int = 1) -> list[B]:
    """``[fn(j) for j in jobs]``, optionally across processes.

    Each job must carry its own seed; the output order is the job order, never
    completion order, so results do not depend on ``workers``.
    """
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        return list(ex.map(fn, jobs))
