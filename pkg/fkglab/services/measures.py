"""
Exact-rational probability measures on H_n.

Constructors (product, fixed-point-of-permutation, Ising-type), the FKG
lattice-condition scan, the positive-association scan over all upset
pairs, and the projections and conditionals used by the induction trace
and the realization compiler.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from fkglab.config import settings
from fkglab.exceptions import (
    CapacityError,
    DimensionMismatchError,
    FkgLabError,
    InvalidMeasureError,
    ZeroMassConditionError,
)
from fkglab.models.rationals import RationalLike, parse_rational
from fkglab.models.schemas import AssociationViolation, FkgViolation
from fkglab.services import worker_pool
from fkglab.services.lattice import Point, PointLike, PointSet, point_to_string
from fkglab.services.upset_catalog import upset_catalog

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Measure:
    """Dense probability measure: weights[v] is the mass of point v"""

    weights: Tuple[Fraction, ...]
    dimension: int

    def __post_init__(self):
        if self.dimension < 0:
            raise InvalidMeasureError(f"dimension must be nonnegative, got {self.dimension}")
        if self.dimension > settings.dimension_cap:
            raise CapacityError("dimension", self.dimension, settings.dimension_cap)
        if len(self.weights) != 1 << self.dimension:
            raise InvalidMeasureError(
                f"expected {1 << self.dimension} weights for n={self.dimension}, got {len(self.weights)}"
            )
        for index, weight in enumerate(self.weights):
            if not isinstance(weight, Fraction):
                raise InvalidMeasureError(f"weight of {point_to_string(index, self.dimension)} is not exact")
            if weight < 0:
                raise InvalidMeasureError(
                    f"negative weight {weight} at {point_to_string(index, self.dimension)}"
                )
        total = sum(self.weights, ZERO)
        if total != 1:
            raise InvalidMeasureError(f"weights sum to {total}, not 1")

    @classmethod
    def from_weights(cls, weights: Sequence[RationalLike]) -> "Measure":
        """Measure from a dense weight list whose length is a power of two"""
        size = len(weights)
        if size == 0 or size & (size - 1):
            raise InvalidMeasureError(f"weight count {size} is not a power of two")
        return cls(tuple(parse_rational(w) for w in weights), size.bit_length() - 1)

    @property
    def size(self) -> int:
        return len(self.weights)

    def weight(self, point: PointLike) -> Fraction:
        if isinstance(point, Point):
            if point.dimension != self.dimension:
                raise DimensionMismatchError(point.dimension, self.dimension)
            point = point.bits
        return self.weights[point]

    def mass(self, points: PointSet) -> Fraction:
        if points.dimension != self.dimension:
            raise DimensionMismatchError(points.dimension, self.dimension)
        return sum((self.weights[v] for v in points), ZERO)

    def has_full_support(self) -> bool:
        return all(w > 0 for w in self.weights)

    def support(self) -> PointSet:
        return PointSet.from_indices(self.dimension, (v for v, w in enumerate(self.weights) if w))

    def as_dict(self) -> Dict[str, Fraction]:
        """Nonzero weights keyed by point string, in index order"""
        return {point_to_string(v, self.dimension): w for v, w in enumerate(self.weights) if w}


# ==================== CONSTRUCTORS ====================

def uniform_measure(n: int) -> Measure:
    size = 1 << n
    return Measure(tuple(Fraction(1, size) for _ in range(size)), n)


def point_mass(point: Point) -> Measure:
    weights = [ZERO] * (1 << point.dimension)
    weights[point.bits] = ONE
    return Measure(tuple(weights), point.dimension)


def product_measure(p: Sequence[RationalLike]) -> Measure:
    """Independent coordinates with P(v_i = 1) = p_i"""
    probabilities = [parse_rational(x) for x in p]
    for i, pi in enumerate(probabilities, start=1):
        if not 0 <= pi <= 1:
            raise InvalidMeasureError(f"p_{i} = {pi} is outside [0, 1]")
    if len(probabilities) > settings.dimension_cap:
        raise CapacityError("dimension", len(probabilities), settings.dimension_cap)

    # Bit i is coordinate i+1: the first 2^i entries have it clear.
    weights: List[Fraction] = [ONE]
    for pi in probabilities:
        weights = [w * (1 - pi) for w in weights] + [w * pi for w in weights]
    return Measure(tuple(weights), len(probabilities))


def derangement_numbers(k: int) -> List[int]:
    """D_0..D_k with D_0 = 1, D_1 = 0, D_j = (j-1)(D_{j-1} + D_{j-2})"""
    numbers = [1, 0]
    for j in range(2, k + 1):
        numbers.append((j - 1) * (numbers[j - 1] + numbers[j - 2]))
    return numbers[: k + 1]


def fixed_point_measure(n: int) -> Measure:
    """Law of the fixed-point set of a uniform permutation of {1..n}"""
    if n < 1:
        raise FkgLabError("fixed_point_measure needs n >= 1")
    if n > settings.dimension_cap:
        raise CapacityError("dimension", n, settings.dimension_cap)
    derangements = derangement_numbers(n)
    total = math.factorial(n)
    weights = tuple(Fraction(derangements[n - v.bit_count()], total) for v in range(1 << n))
    logger.debug(f"[MEASURES] Built fixed-point measure mu_{n}")
    return Measure(weights, n)


def ising_measure(
    couplings: Sequence[Sequence[RationalLike]],
    fields: Sequence[RationalLike],
) -> Measure:
    """Ferromagnetic Ising-type measure with multiplicative parameters.

    weight(v) ∝ Π_{i<j} B_ij^(v_i v_j) · Π_i C_i^(v_i). B_ij plays the role
    of e^(2J_ij) and C_i of e^(2h_i); supplying them directly keeps the
    arithmetic exact. B_ij ≥ 1 makes the weights log-supermodular.
    """
    n = len(fields)
    if n > settings.dimension_cap:
        raise CapacityError("dimension", n, settings.dimension_cap)
    c = [parse_rational(x) for x in fields]
    if len(couplings) != n or any(len(row) != n for row in couplings):
        raise InvalidMeasureError(f"coupling matrix must be {n}x{n}")
    b = [[parse_rational(x) for x in row] for row in couplings]

    for i in range(n):
        if c[i] <= 0:
            raise InvalidMeasureError(f"field C_{i + 1} = {c[i]} must be positive")
        if b[i][i] != 1:
            raise InvalidMeasureError(f"diagonal coupling B_{i + 1}{i + 1} must be 1 (zero interaction)")
        for j in range(i + 1, n):
            if b[i][j] != b[j][i]:
                raise InvalidMeasureError(f"coupling matrix is not symmetric at ({i + 1}, {j + 1})")
            if b[i][j] < 1:
                raise InvalidMeasureError(f"coupling B_{i + 1}{j + 1} = {b[i][j]} is below 1")

    raw = []
    for v in range(1 << n):
        weight = ONE
        for i in range(n):
            if (v >> i) & 1:
                weight *= c[i]
                for j in range(i + 1, n):
                    if (v >> j) & 1:
                        weight *= b[i][j]
        raw.append(weight)
    total = sum(raw, ZERO)
    return Measure(tuple(w / total for w in raw), n)


def mix_with_uniform(measure: Measure, epsilon: RationalLike) -> Measure:
    """(1 - ε)μ + ε·uniform; any ε in (0, 1] gives full support"""
    eps = parse_rational(epsilon)
    if not 0 <= eps <= 1:
        raise InvalidMeasureError(f"epsilon = {eps} is outside [0, 1]")
    share = eps / measure.size
    return Measure(tuple((1 - eps) * w + share for w in measure.weights), measure.dimension)


# ==================== MARGINALS AND PROJECTIONS ====================

def marginals(measure: Measure) -> Tuple[Fraction, ...]:
    """P(v_i = 1) for i = 1..n"""
    n = measure.dimension
    result = [ZERO] * n
    for v, w in enumerate(measure.weights):
        if w:
            for i in range(n):
                if (v >> i) & 1:
                    result[i] += w
    return tuple(result)


def is_product_measure(measure: Measure) -> bool:
    """Exact test: μ equals the product of its one-dimensional marginals"""
    return product_measure(marginals(measure)).weights == measure.weights


def project_last(measure: Measure) -> Tuple[Measure, Fraction]:
    """Fold the last coordinate: μ'(v) = μ(v) + μ(v↑), q = mass of the x_n = 0 face"""
    n = measure.dimension
    if n < 1:
        raise FkgLabError("project_last needs n >= 1")
    half = 1 << (n - 1)
    low, high = measure.weights[:half], measure.weights[half:]
    folded = tuple(a + b for a, b in zip(low, high))
    return Measure(folded, n - 1), sum(low, ZERO)


def prefix_marginals(measure: Measure, length: int) -> List[Fraction]:
    """Joint law of coordinates 1..length, indexed by the prefix bits"""
    if not 0 <= length <= measure.dimension:
        raise FkgLabError(f"prefix length {length} outside 0..{measure.dimension}")
    folded = list(measure.weights)
    while len(folded) > 1 << length:
        half = len(folded) >> 1
        folded = [a + b for a, b in zip(folded[:half], folded[half:])]
    return folded


def _prefix_index(prefix: Sequence[int]) -> int:
    index = 0
    for j, value in enumerate(prefix):
        if value not in (0, 1):
            raise FkgLabError(f"prefix values must be 0 or 1, got {value!r}")
        index |= value << j
    return index


def conditional_zero_prob(measure: Measure, i: int, prefix: Sequence[int]) -> Fraction:
    """μ(v_i = 0 | v_1..v_{i-1} = prefix), coordinates 1-based"""
    if not 1 <= i <= measure.dimension:
        raise FkgLabError(f"coordinate {i} outside 1..{measure.dimension}")
    if len(prefix) != i - 1:
        raise FkgLabError(f"coordinate {i} needs a prefix of length {i - 1}, got {len(prefix)}")
    u = _prefix_index(prefix)
    denominator = prefix_marginals(measure, i - 1)[u]
    if denominator == 0:
        raise ZeroMassConditionError(
            f"conditioning event v_1..v_{i - 1} = {''.join(map(str, prefix))} has mass 0"
        )
    return prefix_marginals(measure, i)[u] / denominator


def conditional_zero_table(measure: Measure, i: int) -> List[Fraction]:
    """conditional_zero_prob for every prefix of coordinate i, indexed by prefix bits"""
    if not 1 <= i <= measure.dimension:
        raise FkgLabError(f"coordinate {i} outside 1..{measure.dimension}")
    outer = prefix_marginals(measure, i - 1)
    inner = prefix_marginals(measure, i)
    table = []
    for u, denominator in enumerate(outer):
        if denominator == 0:
            raise ZeroMassConditionError(
                f"conditioning event v_1..v_{i - 1} = {point_to_string(u, i - 1)} has mass 0"
            )
        table.append(inner[u] / denominator)
    return table


# ==================== FKG AND POSITIVE ASSOCIATION ====================

def _fkg_rows(weights: Tuple[Fraction, ...], rows: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    """First (a, b), a in rows, b > a, with w(a∨b)w(a∧b) < w(a)w(b)"""
    size = len(weights)
    for a in range(*rows):
        wa = weights[a]
        if not wa:
            continue
        for b in range(a + 1, size):
            if a & b == a:
                continue  # comparable pairs hold with equality
            wb = weights[b]
            if wb and weights[a | b] * weights[a & b] < wa * wb:
                return a, b
    return None


def check_fkg_property(measure: Measure, workers: Optional[int] = None) -> Optional[FkgViolation]:
    """None if the lattice condition holds, else the index-lexicographically first violation"""
    chunks = worker_pool.split_range(0, measure.size, worker_pool.resolve_workers(workers))
    found = worker_pool.map_chunks(partial(_fkg_rows, measure.weights), chunks, workers)
    for hit in found:
        if hit is not None:
            a, b = hit
            w = measure.weights
            violation = FkgViolation(
                a=point_to_string(a, measure.dimension),
                b=point_to_string(b, measure.dimension),
                lhs=w[a | b] * w[a & b],
                rhs=w[a] * w[b],
            )
            logger.info(f"[MEASURES] FKG violation at a={violation.a}, b={violation.b}")
            return violation
    return None


def _common_denominator(weights: Sequence[Fraction]) -> Tuple[int, List[int]]:
    scale = math.lcm(*(w.denominator for w in weights))
    return scale, [w.numerator * (scale // w.denominator) for w in weights]


_LOW32 = 0xFFFFFFFF


def _wide_product(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Exact x·y as (high, low) uint64 words, for nonnegative inputs below 2^63"""
    x0, x1 = x & _LOW32, x >> 32
    y0, y1 = y & _LOW32, y >> 32
    p00, p01, p10, p11 = x0 * y0, x0 * y1, x1 * y0, x1 * y1
    middle = (p00 >> 32) + (p01 & _LOW32) + (p10 & _LOW32)
    low = (p00 & _LOW32) | ((middle & _LOW32) << 32)
    high = p11 + (p01 >> 32) + (p10 >> 32) + (middle >> 32)
    return high, low


def _wide_less(x: Tuple[np.ndarray, np.ndarray], y: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    return (x[0] < y[0]) | ((x[0] == y[0]) & (x[1] < y[1]))


def check_positive_association(measure: Measure, block_rows: int = 512) -> Optional[AssociationViolation]:
    """None if every pair of upsets correlates nonnegatively, else the first violating pair.

    Weights are scaled to integers W = L·μ, so μ(E1∩E2) ≥ μ(E1)μ(E2)
    becomes L·W(E1∩E2) ≥ W(E1)·W(E2) and intersections of all pairs are
    one integer matrix product. Every mass is at most L, so the product
    stays in int64 while L < 2^63 and only the final comparison is done
    on 128-bit (high, low) words. Larger L falls back to Python integers.
    """
    n = measure.dimension
    if n > settings.upset_enumeration_cap:
        raise CapacityError("positive-association dimension", n, settings.upset_enumeration_cap)
    upsets = upset_catalog.get_upsets(n)
    scale, scaled = _common_denominator(measure.weights)
    native = scale < (1 << 63)
    dtype = np.uint64 if native else object

    size = measure.size
    membership = np.array(
        [[(s.table >> v) & 1 for v in range(size)] for s in upsets], dtype=dtype
    )
    weighted = membership * np.array(scaled, dtype=dtype)
    masses = weighted.sum(axis=1)
    columns = np.arange(len(upsets))
    scale_column = np.array([scale], dtype=dtype)

    for lo in range(0, len(upsets), block_rows):
        hi = min(lo + block_rows, len(upsets))
        intersections = weighted[lo:hi] @ membership.T
        if native:
            bad = _wide_less(
                _wide_product(intersections, scale_column),
                _wide_product(masses[lo:hi, None], masses[None, :]),
            )
        else:
            bad = np.asarray(intersections * scale < np.outer(masses[lo:hi], masses), dtype=bool)
        bad &= columns[None, :] >= np.arange(lo, hi)[:, None]
        if bad.any():
            row, j = (int(x) for x in np.argwhere(bad)[0])
            i = lo + row
            gap = Fraction(
                int(masses[i]) * int(masses[j]) - int(intersections[row, j]) * scale,
                scale * scale,
            )
            logger.info(f"[MEASURES] Positive association fails for upset pair ({i}, {j})")
            return AssociationViolation(e1=upsets[i].to_strings(), e2=upsets[j].to_strings(), gap=gap)

    logger.info(f"[MEASURES] Positive association holds over {len(upsets)}^2 upset pairs")
    return None
