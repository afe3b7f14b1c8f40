"""
Degree sets of the uniform random graph G(2n, 1/2).

S is the set of vertices of degree ≥ n. The strengthened inequality gives,
for every k with C = C(2n, k),

    C(C, 2)/C² · P(|S| = k)² ≤ P(|S| > k) · P(|S| < k)

and at k = n a bound on P(|S| = n) that tends to √2 - 1.
"""
import logging
import math
from fractions import Fraction
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from fkglab.config import settings
from fkglab.exceptions import CapacityError, InvalidMeasureError
from fkglab.models.rationals import format_decimal
from fkglab.models.schemas import (
    CentralBoundReport,
    DegreeSetDistribution,
    InequalityReport,
    MonteCarloEstimate,
    Verdict,
)
from fkglab.services import worker_pool
from fkglab.services.percolation import hoeffding_half_width

logger = logging.getLogger(__name__)


def graph_edges(vertex_count: int) -> List[Tuple[int, int]]:
    """Vertex pairs u < v in lexicographic order; edge e is bit e of a graph mask"""
    return [(u, v) for u in range(vertex_count) for v in range(u + 1, vertex_count)]


def adjacency_rows(vertex_count: int) -> List[int]:
    """rows[v] has bit e set iff edge e touches v"""
    rows = [0] * vertex_count
    for e, (u, v) in enumerate(graph_edges(vertex_count)):
        rows[u] |= 1 << e
        rows[v] |= 1 << e
    return rows


def degree_set_size(mask: int, n: int) -> int:
    """|S| for one graph mask on 2n vertices"""
    return sum(1 for row in adjacency_rows(2 * n) if (mask & row).bit_count() >= n)


# ==================== EXACT ====================

def _degree_chunk(n: int, rows: Tuple[int, ...], span: Tuple[int, int]) -> List[int]:
    """Histogram of |S| over the graph masks in [lo, hi)"""
    lo, hi = span
    row_masks = [np.uint64(row) for row in rows]
    histogram = np.zeros(2 * n + 1, dtype=np.int64)
    for start in range(lo, hi, settings.degree_chunk_size):
        masks = np.arange(start, min(hi, start + settings.degree_chunk_size), dtype=np.uint64)
        sizes = np.zeros(masks.shape, dtype=np.int64)
        for row in row_masks:
            sizes += np.bitwise_count(masks & row) >= n
        histogram += np.bincount(sizes, minlength=2 * n + 1)
    return histogram.tolist()


def exact_degree_distribution(n: int, force: bool = False,
                              workers: Optional[int] = None) -> DegreeSetDistribution:
    """Enumerate all 2^C(2n,2) labeled graphs on 2n vertices"""
    if n < 0:
        raise InvalidMeasureError(f"n must be nonnegative, got {n}")
    if n > settings.degree_force_cap:
        raise CapacityError("n", n, settings.degree_force_cap, "use the Monte-Carlo estimate")
    if n > settings.degree_exact_cap and not force:
        raise CapacityError(
            "n", n, settings.degree_exact_cap, "use the Monte-Carlo estimate or force the enumeration"
        )
    rows = tuple(adjacency_rows(2 * n))
    edge_count = n * (2 * n - 1)
    total = 1 << edge_count
    chunks = worker_pool.split_range(0, total, worker_pool.resolve_workers(workers))
    parts = worker_pool.map_chunks(partial(_degree_chunk, n, rows), chunks, workers)
    counts = [sum(part[k] for part in parts) for k in range(2 * n + 1)]
    logger.info(f"[DEGREE] Enumerated {total} graphs on {2 * n} vertices")
    return DegreeSetDistribution(n=n, probs=tuple(Fraction(c, total) for c in counts))


def _check_k(dist: DegreeSetDistribution, k: int) -> None:
    if not 0 <= k <= 2 * dist.n:
        raise InvalidMeasureError(f"k = {k} outside 0..{2 * dist.n}")


def corollary_prefactor(c: int) -> Fraction:
    """C(C, 2)/C² = (C - 1)/(2C)"""
    return Fraction(c - 1, 2 * c)


def check_degree_corollary(dist: DegreeSetDistribution, k: int) -> InequalityReport:
    """lhs = P(|S| > k)·P(|S| < k), rhs = (C - 1)/(2C)·P(|S| = k)² with C = C(2n, k)"""
    _check_k(dist, k)
    c = math.comb(2 * dist.n, k)
    return InequalityReport.compare(
        dist.above(k) * dist.below(k),
        corollary_prefactor(c) * dist.probs[k] ** 2,
    )


def check_central_bound(dist: DegreeSetDistribution) -> CentralBoundReport:
    """P(|S| = n)² · C(C, 2) ≤ P(|S| > n)² · C² at C = C(2n, n), compared exactly"""
    n = dist.n
    c = math.comb(2 * n, n)
    pairs = math.comb(c, 2)
    lhs = dist.above(n) ** 2 * c * c
    rhs = dist.probs[n] ** 2 * pairs
    cap = c / (c + 2 * math.sqrt(pairs))
    return CentralBoundReport(
        lhs=lhs,
        rhs=rhs,
        margin=lhs - rhs,
        verdict=Verdict.HOLDS if lhs >= rhs else Verdict.VIOLATED,
        cap_display=f"{cap:.{settings.decimal_digits}g}",
        limit_display=f"{math.sqrt(2) - 1:.{settings.decimal_digits}g}",
    )


def prefactor_comparison(c: int) -> InequalityReport:
    """(C - 1)/(2C) against the Harris-Kleitman-only prefactor ⌊C/2⌋⌈C/2⌉/C²"""
    if c < 1:
        raise InvalidMeasureError(f"C must be positive, got {c}")
    return InequalityReport.compare(
        corollary_prefactor(c),
        Fraction((c // 2) * ((c + 1) // 2), c * c),
    )


def is_complement_symmetric(dist: DegreeSetDistribution) -> bool:
    """P(|S| = k) = P(|S| = 2n - k)"""
    return all(dist.probs[k] == dist.probs[2 * dist.n - k] for k in range(2 * dist.n + 1))


def distribution_rows(dist: DegreeSetDistribution) -> List[Tuple[int, Fraction, str]]:
    """(k, P(|S| = k), decimal) display rows"""
    return [
        (k, p, format_decimal(p, settings.decimal_digits))
        for k, p in enumerate(dist.probs)
    ]


# ==================== MONTE CARLO ====================

def _mc_degree_chunk(n: int, job: Tuple[np.random.SeedSequence, int]) -> List[int]:
    seed_seq, count = job
    rng = np.random.default_rng(seed_seq)
    vertex_count = 2 * n
    edges = graph_edges(vertex_count)
    incidence = np.zeros((len(edges), vertex_count), dtype=np.int32)
    for e, (u, v) in enumerate(edges):
        incidence[e, u] = incidence[e, v] = 1
    histogram = np.zeros(2 * n + 1, dtype=np.int64)
    remaining = count
    while remaining:
        block = min(remaining, settings.mc_chunk_size)
        bits = rng.integers(0, 2, size=(block, len(edges)), dtype=np.int32)
        sizes = ((bits @ incidence) >= n).sum(axis=1)
        histogram += np.bincount(sizes, minlength=2 * n + 1)
        remaining -= block
    return histogram.tolist()


def mc_degree_distribution(n: int, samples: int, seed: int,
                           workers: Optional[int] = None) -> MonteCarloEstimate:
    """Seeded estimate of P(|S| = k) with Hoeffding half-widths; keys are str(k)"""
    if n < 0:
        raise InvalidMeasureError(f"n must be nonnegative, got {n}")
    if samples < 1:
        raise InvalidMeasureError(f"samples must be positive, got {samples}")
    workers = worker_pool.resolve_workers(workers)
    streams = np.random.SeedSequence(seed & ((1 << 64) - 1)).spawn(workers)
    sizes = [hi - lo for lo, hi in worker_pool.split_range(0, samples, workers)]
    parts = worker_pool.map_chunks(partial(_mc_degree_chunk, n), list(zip(streams, sizes)), workers)
    counts = [sum(part[k] for part in parts) for k in range(2 * n + 1)]
    confidence = settings.mc_confidence
    logger.info(f"[DEGREE] Monte-Carlo estimate from {samples} samples (seed={seed}, workers={workers})")
    return MonteCarloEstimate(
        samples=samples,
        seed=seed,
        workers=workers,
        counts={str(k): c for k, c in enumerate(counts)},
        frequencies={str(k): Fraction(c, samples) for k, c in enumerate(counts)},
        half_width=hoeffding_half_width(samples, confidence),
        confidence=confidence,
    )
