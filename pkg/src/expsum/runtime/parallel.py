"""Concurrent fan-out of independent jobs (sweep primes, verify cases).

Jobs run through asyncio on either worker threads or a process pool; results come back
positionally, with exceptions returned in place so one failed prime never sinks the batch.

Enumeration is pure-Python and numpy work that holds the GIL for most of its run, so
threads only isolate failures. Pass `processes=True` for throughput; then every job, result
and raised exception must pickle (module-level callables under `functools.partial`).
"""

from __future__ import annotations

import asyncio
from collections.abc import Callable, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Any


async def _gather_bounded(
    jobs: Sequence[Callable[[], Any]], workers: int, executor: Executor | None = None
) -> list[Any]:
    sem = asyncio.Semaphore(max(1, workers))
    loop = asyncio.get_running_loop()

    async def _one(job: Callable[[], Any]) -> Any:
        async with sem:
            if executor is None:
                return await asyncio.to_thread(job)
            return await loop.run_in_executor(executor, job)

    return await asyncio.gather(*(_one(j) for j in jobs), return_exceptions=True)


def run_parallel(
    jobs: Sequence[Callable[[], Any]], workers: int = 4, *, processes: bool = False
) -> list[Any]:
    """Run zero-argument jobs concurrently; returns results/exceptions in input order."""
    if not jobs:
        return []
    if workers <= 1:
        out: list[Any] = []
        for job in jobs:
            try:
                out.append(job())
            except Exception as exc:
                out.append(exc)
        return out
    if not processes:
        return asyncio.run(_gather_bounded(jobs, workers))
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return asyncio.run(_gather_bounded(jobs, workers, pool))
