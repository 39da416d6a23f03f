"""Process-level fan-out capped by the ``STABCAP_THREADS`` environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

from stabcap.errors import StabcapError

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Number of worker processes; defaults to 1 (serial) when the variable is unset."""
    raw = os.environ.get("STABCAP_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise StabcapError(f"STABCAP_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise StabcapError(f"STABCAP_THREADS must be a positive integer, got {raw!r}")
    return min(n, os.cpu_count() or 1)


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map; results do not depend on the worker count."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
