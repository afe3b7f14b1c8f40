"""
Bond percolation on a finite graph: exact and Monte-Carlo probabilities of
the connectivity classes of three marked vertices, and the inequality

    P(123)P(1|2|3) ≥ P(12|3)P(13|2) + P(12|3)P(1|23) + P(13|2)P(1|23).
"""
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from fkglab.config import settings
from fkglab.exceptions import CapacityError, InvalidGraphError
from fkglab.models.rationals import RationalLike, parse_rational
from fkglab.models.schemas import (
    TRIPLE_CLASS_NAMES,
    InequalityReport,
    MonteCarloEstimate,
    TriplePartitionProbs,
)
from fkglab.services import worker_pool
from fkglab.services.measures import Measure, product_measure
from fkglab.services.strong_inequality import LABEL_A, LABEL_B, Partition, e2, validate_partition

logger = logging.getLogger(__name__)

# Class indices, in TRIPLE_CLASS_NAMES order
CLASS_123, CLASS_12_3, CLASS_13_2, CLASS_1_23, CLASS_1_2_3 = range(5)

# Connectivity class -> block label: A = (123), B = (1|2|3), C1 = (1|23), C2 = (13|2), C3 = (12|3)
CLASS_LABELS = {
    CLASS_123: LABEL_A,
    CLASS_1_2_3: LABEL_B,
    CLASS_1_23: 1,
    CLASS_13_2: 2,
    CLASS_12_3: 3,
}

Terminals = Tuple[int, int, int]


class Edge(NamedTuple):
    u: int
    v: int
    p: Fraction


@dataclass(frozen=True)
class EdgeGraph:
    """Simple graph with an exact survival probability per edge"""

    vertex_count: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        if self.vertex_count < 0:
            raise InvalidGraphError(f"vertex count must be nonnegative, got {self.vertex_count}")
        seen = set()
        for edge in self.edges:
            if not 0 <= edge.u < edge.v < self.vertex_count:
                raise InvalidGraphError(
                    f"edge ({edge.u}, {edge.v}) needs endpoints u < v in 0..{self.vertex_count - 1}"
                )
            if (edge.u, edge.v) in seen:
                raise InvalidGraphError(f"duplicate edge ({edge.u}, {edge.v})")
            seen.add((edge.u, edge.v))
            if not isinstance(edge.p, Fraction) or not 0 <= edge.p <= 1:
                raise InvalidGraphError(f"edge ({edge.u}, {edge.v}) has probability {edge.p!r} outside [0, 1]")

    @classmethod
    def build(cls, vertex_count: int, edges: Sequence[Tuple[int, int, RationalLike]]) -> "EdgeGraph":
        """Normalises endpoint order; p = 0 or 1 are accepted as forced edges"""
        normalised = []
        for u, v, p in edges:
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u}")
            u, v = min(u, v), max(u, v)
            normalised.append(Edge(u, v, parse_rational(p)))
        return cls(vertex_count, tuple(normalised))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def payload(self) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
        return self.vertex_count, tuple((e.u, e.v) for e in self.edges)


class UnionFind:
    """Disjoint sets with path compression and union by rank"""

    def __init__(self, size: int):
        self.parents = list(range(size))
        self.ranks = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parents[root] != root:
            root = self.parents[root]
        while self.parents[x] != root:
            self.parents[x], x = root, self.parents[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.ranks[rx] < self.ranks[ry]:
            rx, ry = ry, rx
        self.parents[ry] = rx
        if self.ranks[rx] == self.ranks[ry]:
            self.ranks[rx] += 1
        return True


def classify(forest: UnionFind, terminals: Terminals) -> int:
    r1, r2, r3 = (forest.find(t) for t in terminals)
    if r1 == r2 == r3:
        return CLASS_123
    if r1 == r2:
        return CLASS_12_3
    if r1 == r3:
        return CLASS_13_2
    if r2 == r3:
        return CLASS_1_23
    return CLASS_1_2_3


def classify_subgraph(vertex_count: int, endpoints: Sequence[Tuple[int, int]],
                      mask: int, terminals: Terminals) -> int:
    """Connectivity class of the terminals in the subgraph of edges selected by `mask`"""
    forest = UnionFind(vertex_count)
    for e, (u, v) in enumerate(endpoints):
        if (mask >> e) & 1:
            forest.union(u, v)
    return classify(forest, terminals)


def _check_terminals(graph: EdgeGraph, terminals: Sequence[int]) -> Terminals:
    if len(terminals) != 3:
        raise InvalidGraphError(f"need exactly three terminals, got {len(terminals)}")
    if len(set(terminals)) != 3:
        raise InvalidGraphError(f"terminals {tuple(terminals)} are not distinct")
    for t in terminals:
        if not 0 <= t < graph.vertex_count:
            raise InvalidGraphError(f"terminal {t} outside 0..{graph.vertex_count - 1}")
    return terminals[0], terminals[1], terminals[2]


def survival_threshold(p: Fraction) -> int:
    """⌊p·2^64⌋: a uniform 64-bit draw below it has probability within 2^-64 of p"""
    return (p.numerator << 64) // p.denominator


def hoeffding_half_width(samples: int, confidence: float) -> float:
    """Two-sided Hoeffding half-width for a frequency from `samples` draws"""
    return math.sqrt(math.log(2 / (1 - confidence)) / (2 * samples))


def _probs_from_list(values: Sequence[Fraction]) -> TriplePartitionProbs:
    return TriplePartitionProbs(**dict(zip(TriplePartitionProbs.model_fields, values)))


# ==================== EXACT ====================

def _exact_chunk(
    payload: Tuple[int, Tuple[Tuple[int, int], ...]],
    factors: Tuple[Tuple[int, int], ...],
    terminals: Terminals,
    rows: Tuple[int, int],
) -> List[int]:
    """Integer class masses over the common denominator for masks in [lo, hi)"""
    vertex_count, endpoints = payload
    totals = [0] * 5
    for mask in range(*rows):
        weight = 1
        for e, (absent, present) in enumerate(factors):
            weight *= present if (mask >> e) & 1 else absent
            if not weight:
                break
        if weight:
            totals[classify_subgraph(vertex_count, endpoints, mask, terminals)] += weight
    return totals


def exact_triple_probs(graph: EdgeGraph, terminals: Sequence[int],
                       workers: Optional[int] = None) -> TriplePartitionProbs:
    """Enumerate all 2^|E| spanning subgraphs and accumulate exact class masses"""
    t = _check_terminals(graph, terminals)
    if graph.edge_count > settings.exact_edge_cap:
        raise CapacityError(
            "edge count", graph.edge_count, settings.exact_edge_cap, "use the Monte-Carlo estimate"
        )
    # p_e = a/b contributes a (present) or b - a (absent) over the product of all b
    factors = tuple(
        (e.p.denominator - e.p.numerator, e.p.numerator) for e in graph.edges
    )
    denominator = math.prod(e.p.denominator for e in graph.edges)
    size = 1 << graph.edge_count
    chunks = worker_pool.split_range(0, size, worker_pool.resolve_workers(workers))
    parts = worker_pool.map_chunks(
        partial(_exact_chunk, graph.payload(), factors, t), chunks, workers
    )
    totals = [sum(part[c] for part in parts) for c in range(5)]
    logger.info(f"[PERCOLATION] Exact enumeration over {size} subgraphs")
    return _probs_from_list([Fraction(x, denominator) for x in totals])


def check_percolation_inequality(probs: TriplePartitionProbs) -> InequalityReport:
    """P(123)P(1|2|3) against e2(P(12|3), P(13|2), P(1|23))"""
    return InequalityReport.compare(
        probs.p123 * probs.p1_2_3,
        e2([probs.p12_3, probs.p13_2, probs.p1_23]),
    )


# ==================== MONTE CARLO ====================

def _mc_chunk(
    payload: Tuple[int, Tuple[Tuple[int, int], ...]],
    thresholds: Tuple[int, ...],
    terminals: Terminals,
    job: Tuple[np.random.SeedSequence, int],
) -> List[int]:
    """Class counts of `count` subgraph draws from one seed stream"""
    seed_seq, count = job
    vertex_count, endpoints = payload
    rng = np.random.default_rng(seed_seq)
    totals = [0] * 5
    if not endpoints:
        totals[classify_subgraph(vertex_count, endpoints, 0, terminals)] = count
        return totals

    always = np.array([x >> 64 > 0 for x in thresholds])
    limits = np.array([min(x, (1 << 64) - 1) for x in thresholds], dtype=np.uint64)
    weights = np.left_shift(np.uint64(1), np.arange(len(endpoints), dtype=np.uint64))
    remaining = count
    while remaining:
        block = min(remaining, settings.mc_chunk_size)
        draws = rng.integers(0, (1 << 64) - 1, size=(block, len(endpoints)), dtype=np.uint64, endpoint=True)
        survive = (draws < limits) | always
        masks = (survive.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        values, counts = np.unique(masks, return_counts=True)
        for mask, hits in zip(values.tolist(), counts.tolist()):
            totals[classify_subgraph(vertex_count, endpoints, mask, terminals)] += hits
        remaining -= block
    return totals


def mc_triple_probs(graph: EdgeGraph, terminals: Sequence[int], samples: int, seed: int,
                    workers: Optional[int] = None) -> MonteCarloEstimate:
    """Seeded estimate of the five class probabilities with Hoeffding half-widths.

    Worker j draws from SeedSequence(seed).spawn(workers)[j], so results are
    reproducible for a fixed worker count.
    """
    t = _check_terminals(graph, terminals)
    if samples < 1:
        raise InvalidGraphError(f"samples must be positive, got {samples}")
    if graph.edge_count > 64:
        raise CapacityError("edge count", graph.edge_count, 64, "Monte-Carlo masks are 64-bit")
    workers = worker_pool.resolve_workers(workers)
    streams = np.random.SeedSequence(seed & ((1 << 64) - 1)).spawn(workers)
    sizes = [hi - lo for lo, hi in worker_pool.split_range(0, samples, workers)]
    thresholds = tuple(survival_threshold(e.p) for e in graph.edges)
    parts = worker_pool.map_chunks(
        partial(_mc_chunk, graph.payload(), thresholds, t), list(zip(streams, sizes)), workers
    )
    totals = [sum(part[c] for part in parts) for c in range(5)]
    confidence = settings.mc_confidence
    logger.info(f"[PERCOLATION] Monte-Carlo estimate from {samples} samples (seed={seed}, workers={workers})")
    return MonteCarloEstimate(
        samples=samples,
        seed=seed,
        workers=workers,
        counts=dict(zip(TRIPLE_CLASS_NAMES, totals)),
        frequencies={name: Fraction(x, samples) for name, x in zip(TRIPLE_CLASS_NAMES, totals)},
        half_width=hoeffding_half_width(samples, confidence),
        confidence=confidence,
    )


# ==================== EMBEDDING ====================

def percolation_to_partition(graph: EdgeGraph, terminals: Sequence[int]) -> Tuple[Measure, Partition]:
    """Edge-indicator product measure on H_|E| with subgraphs labeled by connectivity class"""
    t = _check_terminals(graph, terminals)
    if graph.edge_count > settings.embedding_edge_cap:
        raise CapacityError("edge count", graph.edge_count, settings.embedding_edge_cap)
    measure = product_measure([e.p for e in graph.edges])
    vertex_count, endpoints = graph.payload()
    labels = [
        CLASS_LABELS[classify_subgraph(vertex_count, endpoints, mask, t)]
        for mask in range(1 << graph.edge_count)
    ]
    partition = validate_partition(graph.edge_count, labels, k=3)
    logger.debug(f"[PERCOLATION] Embedded {graph.edge_count} edges as a partition of H_{graph.edge_count}")
    return measure, partition


# ==================== GRAPH BUILDERS ====================

def triangle_graph(p: RationalLike = Fraction(1, 2)) -> EdgeGraph:
    return EdgeGraph.build(3, [(0, 1, p), (0, 2, p), (1, 2, p)])


def path_graph(p: RationalLike = Fraction(1, 2)) -> EdgeGraph:
    """0 - 1 - 2"""
    return EdgeGraph.build(3, [(0, 1, p), (1, 2, p)])


def random_graph(rng: random.Random, max_edges: int = 12, max_vertices: int = 6,
                 max_denominator: int = 10) -> Tuple[EdgeGraph, Terminals]:
    """Random simple graph with rational p_e in (0, 1) and three random terminals"""
    vertex_count = rng.randint(3, max_vertices)
    pairs = [(u, v) for u in range(vertex_count) for v in range(u + 1, vertex_count)]
    chosen = sorted(rng.sample(pairs, rng.randint(1, min(max_edges, len(pairs)))))
    edges = []
    for u, v in chosen:
        denominator = rng.randint(2, max_denominator)
        edges.append((u, v, Fraction(rng.randint(1, denominator - 1), denominator)))
    a, b, c = rng.sample(range(vertex_count), 3)
    return EdgeGraph.build(vertex_count, edges), (a, b, c)
