"""
Monotone realizations: independent Bernoulli sources plus one monotone
Boolean output per coordinate.

`realize` compiles a full-support measure with the FKG property into
such a witness. Coordinate i is decided by comparing a uniform Z_i with
the conditional threshold t(prefix) = μ(v_i = 0 | v_1..v_{i-1} = prefix).
The distinct thresholds t_(1) < ... < t_(r) define nested indicators
[Z_i ≥ t_(j)], encoded as the prefixes of a chain of independent
sources W_1..W_r with P(W_j = 1) = (1 - t_(j)) / (1 - t_(j-1)), t_(0) = 0.
Output i selects the indicator of its own prefix's threshold; FKG makes
thresholds non-increasing in the prefix, so the selector is monotone.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

from fkglab.config import settings
from fkglab.exceptions import CapacityError, DimensionMismatchError, RealizationError
from fkglab.models.rationals import RationalLike, parse_rational
from fkglab.models.schemas import MonotonicityWitness, RealizationVerdict, Verdict
from fkglab.services import worker_pool
from fkglab.services.lattice import PointSet, point_to_string, upset_witness
from fkglab.services.measures import Measure, check_fkg_property, conditional_zero_table
from fkglab.services.upset_catalog import upset_catalog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Realization:
    """sources[j] = P(W_j = 1); bit s of outputs[i] is X_{i+1} on source assignment s"""

    sources: Tuple[Fraction, ...]
    outputs: Tuple[int, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        for j, p in enumerate(self.sources):
            if not isinstance(p, Fraction) or not 0 <= p <= 1:
                raise RealizationError(f"source {j} has probability {p!r} outside [0, 1]")
        for i, table in enumerate(self.outputs):
            if table < 0 or table >> (1 << self.m):
                raise RealizationError(f"truth table of output {i + 1} is longer than 2^m")
        if self.names and len(self.names) != self.m:
            raise RealizationError(f"{len(self.names)} names for {self.m} sources")

    @property
    def m(self) -> int:
        return len(self.sources)

    @property
    def n(self) -> int:
        return len(self.outputs)

    def table_string(self, i: int) -> str:
        """Character s is the output on assignment s"""
        return "".join(str((self.outputs[i] >> s) & 1) for s in range(1 << self.m))


def identity_realization(p: Sequence[RationalLike]) -> Realization:
    """X_i = W_i over sources with P(W_i = 1) = p_i"""
    sources = tuple(parse_rational(x) for x in p)
    m = len(sources)
    outputs = tuple(
        sum(1 << s for s in range(1 << m) if (s >> i) & 1) for i in range(m)
    )
    return Realization(sources, outputs, tuple(f"W({i + 1})" for i in range(m)))


# ==================== COMPILER ====================

def _check_threshold_monotonicity(thresholds: List[Fraction], length: int, i: int) -> None:
    """t(u) ≥ t(u | bit) for every prefix u and every clear bit"""
    for u, t in enumerate(thresholds):
        for bit in range(length):
            if not (u >> bit) & 1 and t < thresholds[u | (1 << bit)]:
                raise RealizationError(
                    f"threshold of coordinate {i} increases from prefix {point_to_string(u, length)} "
                    f"to {point_to_string(u | (1 << bit), length)}"
                )


def realize(measure: Measure) -> Realization:
    """Compile a full-support FKG measure into a monotone realization with the same law"""
    n = measure.dimension
    violation = check_fkg_property(measure)
    if violation is not None:
        raise RealizationError(
            f"measure fails the FKG property at a={violation.a}, b={violation.b} "
            f"({violation.lhs} < {violation.rhs})"
        )
    if not measure.has_full_support():
        raise RealizationError(
            "measure has zero weights; mix it with ε·uniform (mix_with_uniform) to study degenerate cases"
        )

    sources: List[Fraction] = []
    names: List[str] = []
    # Per coordinate: (index of its first chain source, threshold rank per prefix)
    selectors: List[Tuple[int, List[int]]] = []

    for i in range(1, n + 1):
        thresholds = conditional_zero_table(measure, i)
        _check_threshold_monotonicity(thresholds, i - 1, i)
        levels = sorted(set(thresholds))
        if levels[-1] >= 1:
            raise RealizationError(f"coordinate {i} has a threshold of 1 under full support")
        first = len(sources)
        previous = Fraction(0)
        for level in levels:
            sources.append((1 - level) / (1 - previous))
            prefixes = [point_to_string(u, i - 1) for u, t in enumerate(thresholds) if t == level]
            names.append(f"Y({i}|{'/'.join(prefixes)})")
            previous = level
        rank = {level: j for j, level in enumerate(levels)}
        selectors.append((first, [rank[t] for t in thresholds]))
        logger.debug(f"[REALIZATION] Coordinate {i}: {len(levels)} distinct thresholds")

    m = len(sources)
    if m > settings.pushforward_cap:
        logger.warning(f"[REALIZATION] {m} sources exceed the exhaustive verification cap")

    outputs = [0] * n
    for s in range(1 << m):
        prefix = 0
        for i, (first, ranks) in enumerate(selectors):
            chain = ranks[prefix] + 1  # indicator j is the conjunction of the first j+1 chain sources
            window = ((1 << chain) - 1) << first
            if s & window == window:
                outputs[i] |= 1 << s
                prefix |= 1 << i
    logger.info(f"[REALIZATION] Realized n={n} with m={m} sources")
    return Realization(tuple(sources), tuple(outputs), tuple(names))


# ==================== VERIFICATION ====================

def monotonicity_witness(realization: Realization) -> Optional[MonotonicityWitness]:
    """First output whose set of 1-assignments is not an upset of H_m"""
    for i, table in enumerate(realization.outputs):
        witness = upset_witness(PointSet(table, realization.m))
        if witness is not None:
            low, high = witness
            return MonotonicityWitness(output=i + 1, assignment=low, bit=(high ^ low).bit_length() - 1)
    return None


def is_monotone_table(table: int, m: int) -> bool:
    return upset_witness(PointSet(table, m)) is None


def _pushforward_chunk(
    sources: Tuple[Fraction, ...],
    outputs: Tuple[int, ...],
    rows: Tuple[int, int],
) -> Dict[int, Fraction]:
    """Mass per output vector over assignments in [lo, hi)"""
    lo, hi = rows
    tables = [bin(table)[2:].zfill(1 << len(sources))[::-1] for table in outputs]
    masses: Dict[int, Fraction] = {}
    for s in range(lo, hi):
        weight = Fraction(1)
        for j, p in enumerate(sources):
            weight *= p if (s >> j) & 1 else 1 - p
            if not weight:
                break
        if not weight:
            continue
        vector = 0
        for i, table in enumerate(tables):
            if table[s] == "1":
                vector |= 1 << i
        masses[vector] = masses.get(vector, Fraction(0)) + weight
    return masses


def pushforward(realization: Realization, workers: Optional[int] = None) -> Measure:
    """Exact law of (X_1..X_n) under the independent sources"""
    m = realization.m
    if m > settings.pushforward_cap:
        raise CapacityError("source count m", m, settings.pushforward_cap)
    size = 1 << m
    chunks = worker_pool.split_range(0, size, worker_pool.resolve_workers(workers))
    parts = worker_pool.map_chunks(
        partial(_pushforward_chunk, realization.sources, realization.outputs), chunks, workers
    )
    weights = [Fraction(0)] * (1 << realization.n)
    for part in parts:
        for vector, mass in part.items():
            weights[vector] += mass
    return Measure(tuple(weights), realization.n)


def verify_realization(realization: Realization, measure: Measure,
                       workers: Optional[int] = None) -> RealizationVerdict:
    """Monotone truth tables and an exactly matching pushforward"""
    if realization.n != measure.dimension:
        raise DimensionMismatchError(realization.n, measure.dimension)
    if realization.m > settings.pushforward_cap:
        raise CapacityError("source count m", realization.m, settings.pushforward_cap)

    witness = monotonicity_witness(realization)
    law = pushforward(realization, workers)
    mismatched = [
        point_to_string(v, measure.dimension)
        for v, (got, want) in enumerate(zip(law.weights, measure.weights))
        if got != want
    ]
    matches = not mismatched
    verdict = Verdict.HOLDS if witness is None and matches else Verdict.VIOLATED
    logger.info(f"[REALIZATION] Verification verdict: {verdict.value}")
    return RealizationVerdict(
        verdict=verdict,
        monotonicity_witness=witness,
        pushforward_matches=matches,
        mismatched_points=mismatched,
    )


def random_source_probability(rng: random.Random, max_denominator: int = 12) -> Fraction:
    denominator = rng.randint(2, max_denominator)
    return Fraction(rng.randint(1, denominator - 1), denominator)


def random_monotone_realization(m: int, n: int, rng: random.Random) -> Realization:
    """n uniform random monotone functions of m sources with random rational probabilities"""
    sources = tuple(random_source_probability(rng) for _ in range(m))
    outputs = tuple(upset_catalog.random_upset(m, rng).table for _ in range(n))
    return Realization(sources, outputs, tuple(f"W({j + 1})" for j in range(m)))
