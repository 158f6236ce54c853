import logging
import os
from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: Optional[int] = None) -> int:
    if jobs is None:
        jobs = settings.DEFAULT_JOBS
    if jobs is None:
        jobs = os.cpu_count() or 1
    return max(1, int(jobs))


class TrialPool:
    def __init__(self, jobs: Optional[int] = None):
        self.executor: Optional[Executor] = None
        self.requested_jobs = jobs
        self.jobs: int = 1
        self.connected = False

    def connect(self, jobs: Optional[int] = None):
        """Start worker processes; a single job runs trials in-process."""
        self.disconnect()
        self.jobs = resolve_jobs(jobs if jobs is not None else self.requested_jobs)
        if self.jobs > 1:
            self.executor = ProcessPoolExecutor(max_workers=self.jobs)
        self.connected = True
        logger.info("Trial pool ready with %d worker(s)", self.jobs)

    def disconnect(self):
        self.connected = False
        if self.executor:
            self.executor.shutdown(wait=True)
            self.executor = None
            logger.info("Trial pool closed")

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Results come back in submission order regardless of the worker count."""
        items = list(items)
        if self.executor is None or len(items) < 2:
            return [fn(item) for item in items]
        chunksize = max(1, len(items) // (4 * self.jobs))
        return list(self.executor.map(fn, items, chunksize=chunksize))

    def status(self) -> dict:
        return {
            "connected": self.connected,
            "jobs": self.jobs,
            "workers": self.executor is not None,
        }

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, *exc):
        self.disconnect()
        return False


trial_pool = TrialPool()
