"""
In-memory catalog of enumerated upsets.

Enumerating the upsets of H_n is the expensive step of every
positive-association scan and of the FUI generators, so results are kept
per dimension for the lifetime of the process.
"""
import logging
import random
import threading
from typing import Any, Dict, List, Tuple

from fkglab.services.lattice import PointSet, enumerate_upsets

logger = logging.getLogger(__name__)


class UpsetCatalog:
    """Thread-safe cache of enumerate_upsets results keyed by dimension"""

    def __init__(self):
        self.upsets: Dict[int, Tuple[PointSet, ...]] = {}
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

        logger.debug("[UPSET_CATALOG] UpsetCatalog initialized")

    def get_upsets(self, n: int) -> Tuple[PointSet, ...]:
        """Upsets of H_n in enumeration order, computed once"""
        with self._lock:
            cached = self.upsets.get(n)
            if cached is not None:
                self.hits += 1
                return cached
            self.misses += 1
            upsets = enumerate_upsets(n)
            self.upsets[n] = upsets
            logger.info(f"[UPSET_CATALOG] Cached {len(upsets)} upsets for n={n}")
            return upsets

    def random_upset(self, n: int, rng: random.Random) -> PointSet:
        """Uniform random upset of H_n, i.e. a random monotone Boolean function of n bits"""
        upsets = self.get_upsets(n)
        return upsets[rng.randrange(len(upsets))]

    def get_dimensions(self) -> List[int]:
        with self._lock:
            return sorted(self.upsets)

    def get_stats(self) -> Dict[str, Any]:
        with self._lock:
            return {
                "dimensions": sorted(self.upsets),
                "sizes": {n: len(u) for n, u in self.upsets.items()},
                "hits": self.hits,
                "misses": self.misses,
            }

    def clear_all(self) -> None:
        """Drop every cached enumeration (for testing/debugging)"""
        with self._lock:
            self.upsets.clear()
            self.hits = 0
            self.misses = 0
            logger.info("[UPSET_CATALOG] Cleared all cached upsets")


# Global instance
upset_catalog = UpsetCatalog()
