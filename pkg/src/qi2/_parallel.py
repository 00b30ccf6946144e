"""Deterministic chunked parallelism.

Work is split into fixed-size anchor chunks whose boundaries do not depend
on the worker count, and every chunk is computed with the same per-anchor
arithmetic regardless of which process runs it, so results are
byte-identical for any number of workers. Worker payloads are shipped once
per process through the pool initializer.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

CHUNK_SIZE = 256

_PAYLOAD = None


def resolve_workers(explicit: int | None = None) -> int:
    """Worker count: explicit argument, then QI2_THREADS, then CPU count."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("QI2_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _init_worker(payload):
    global _PAYLOAD
    _PAYLOAD = payload


def payload():
    return _PAYLOAD


def chunk_bounds(n_items: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int]]:
    return [(s, min(s + chunk_size, n_items)) for s in range(0, n_items, chunk_size)]


def run_chunked(chunk_fn, payload_obj, n_items: int, workers: int,
                chunk_size: int = CHUNK_SIZE) -> list:
    """Run `chunk_fn((start, end))` over fixed chunks, in order.

    `chunk_fn` reads its inputs from `_parallel.payload()`. With one worker
    everything runs in-process.
    """
    bounds = chunk_bounds(n_items, chunk_size)
    if workers <= 1 or len(bounds) <= 1:
        _init_worker(payload_obj)
        try:
            return [chunk_fn(b) for b in bounds]
        finally:
            _init_worker(None)
    with ProcessPoolExecutor(
        max_workers=min(workers, len(bounds)),
        initializer=_init_worker,
        initargs=(payload_obj,),
    ) as pool:
        return list(pool.map(chunk_fn, bounds))
