"""Deterministic work distribution.

Work is always split into chunks whose boundaries depend only on the
problem, never on the worker count; chunk results are combined in chunk
order.  Two runs with different ``threads`` settings therefore produce
bit-identical output.
"""

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_threads(threads) -> int:
    """Normalise a thread-count flag ('auto', None, or int) to an int >= 1."""
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    n = int(threads)
    if n < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return n


def deterministic_map(fn, chunks, threads: int = 1) -> list:
    """Map fn over chunks, preserving order; pool size never changes results."""
    threads = resolve_threads(threads)
    if threads == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(threads, len(chunks))) as pool:
        return list(pool.map(fn, chunks))
