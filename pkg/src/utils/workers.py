import logging
import os

import psutil

logger = logging.getLogger(__name__)

THREADS_ENV = "BOVDYN_THREADS"


def resolve_workers(requested=None):
    """Worker count for render/probe: explicit request, capped by BOVDYN_THREADS."""
    workers = requested or psutil.cpu_count(logical=True) or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            logger.warning(f"Ignoring {THREADS_ENV}={cap!r}: not an integer")
    return max(1, int(workers))


def split_rows(ny, workers):
    """Disjoint [start, stop) row bands, a few per worker so progress stays smooth."""
    if ny <= 0:
        return []
    bands = min(ny, max(1, workers * 4))
    edges = [round(i * ny / bands) for i in range(bands + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]
