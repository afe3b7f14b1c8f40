"""
Range partitioning over a process pool.

Chunk functions must be module-level (picklable). Results always come
back in chunk order so reductions are deterministic for a fixed worker
count; with one worker everything runs inline.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

from fkglab.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    """Explicit value, else settings (FKGLAB_WORKERS), never below 1"""
    if workers is None:
        workers = settings.workers
    return max(1, int(workers))


def split_range(start: int, stop: int, parts: int) -> List[Tuple[int, int]]:
    """Contiguous [lo, hi) pieces covering [start, stop); earlier pieces take the remainder"""
    total = max(0, stop - start)
    parts = max(1, min(parts, total)) if total else 1
    base, extra = divmod(total, parts)
    chunks = []
    lo = start
    for index in range(parts):
        hi = lo + base + (1 if index < extra else 0)
        chunks.append((lo, hi))
        lo = hi
    return chunks


def map_chunks(func: Callable[[T], R], chunks: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """Apply func to every chunk, in parallel when workers > 1, preserving order"""
    workers = resolve_workers(workers)
    if workers == 1 or len(chunks) <= 1:
        return [func(chunk) for chunk in chunks]
    logger.debug(f"[WORKER_POOL] Mapping {len(chunks)} chunks over {workers} processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, chunks))
