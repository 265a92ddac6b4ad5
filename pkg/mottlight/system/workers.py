"""Worker pool for independent scan points.

Scan points (detunings, storage times, interaction times) are evaluated
concurrently and collected in submission order, so results never depend on
the thread count. numpy and scipy release the GIL inside their kernels,
which is where the scan points spend their time.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger("mottlight.system")

T = TypeVar("T")
R = TypeVar("R")


class ScanPool:
    """Order-preserving thread pool for scan points.

    Attributes:
        threads: Number of worker threads (1 runs inline without a pool).

    Example:
        pool = ScanPool(threads=4)
        pool.start()
        fractions = pool.map(simulate_point, detunings)
        pool.stop()

    The pool is also a context manager that starts and stops itself.
    """

    def __init__(self, threads: int = 1):
        """Initialize ScanPool.

        Args:
            threads: Number of worker threads, at least 1.

        Raises:
            ValueError: If threads < 1.
        """
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._executor: Optional[ThreadPoolExecutor] = None
        self._lock = threading.Lock()

    def start(self):
        """Start the worker threads. No-op for a single thread."""
        with self._lock:
            if self.threads > 1 and self._executor is None:
                self._executor = ThreadPoolExecutor(
                    max_workers=self.threads, thread_name_prefix="scan-worker"
                )
                logger.debug("Scan pool started: threads=%d", self.threads)

    def stop(self):
        """Wait for running points and release the worker threads."""
        with self._lock:
            if self._executor is not None:
                self._executor.shutdown(wait=True)
                self._executor = None
                logger.debug("Scan pool stopped")

    @property
    def running(self) -> bool:
        return self._executor is not None

    def map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Evaluate func over items, returning results in input order.

        The first exception raised by any point is re-raised after all
        submitted points have finished.

        Args:
            func: Pure function of one scan point.
            items: Scan points.

        Returns:
            list: func(item) for each item, in the order given.
        """
        items = list(items)
        if not items:
            return []
        if self._executor is None:
            return [func(item) for item in items]

        futures = [self._executor.submit(func, item) for item in items]
        results = []
        first_error = None
        for future in futures:
            try:
                results.append(future.result())
            except Exception as e:
                if first_error is None:
                    first_error = e
                results.append(None)
        if first_error is not None:
            logger.error("Scan point failed: %s", first_error)
            raise first_error
        return results

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.stop()
        return False
