"""
The strengthened Harris-Kleitman/FKG inequality

    μ(A)μ(B) ≥ e2(μ(C_1), ..., μ(C_k))

for partitions H_n = A ⊔ C_1 ⊔ ... ⊔ C_k ⊔ B in which every A ∪ C_i is
closed upwards, together with the k = 2 identity and the
last-coordinate induction trace of its proof.
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from fkglab.config import settings
from fkglab.exceptions import (
    DimensionMismatchError,
    FkgLabError,
    IllegalFiberError,
    InvalidPartitionError,
    NotProductMeasureError,
)
from fkglab.models.schemas import InductionTrace, InductionVerdict, InequalityReport, Verdict
from fkglab.services.lattice import (
    Point,
    PointSet,
    downset_witness,
    point_from_string,
    point_to_string,
    topological_order,
    upper_cover_mask,
    upset_witness,
)
from fkglab.services.measures import Measure, is_product_measure, project_last
from fkglab.services.upset_catalog import upset_catalog

logger = logging.getLogger(__name__)

# Label encoding: A = 0, C_i = i (1..k), B = -1
LABEL_A = 0
LABEL_B = -1

LabelLike = Union[int, str]
BlockLike = Union[PointSet, Sequence[str]]


def label_name(label: int) -> str:
    if label == LABEL_A:
        return "A"
    if label == LABEL_B:
        return "B"
    return f"C{label}"


def parse_label(label: LabelLike) -> int:
    """Accepts 0 / -1 / i or "A" / "B" / "C<i>" """
    if isinstance(label, int) and not isinstance(label, bool):
        return label
    if isinstance(label, str):
        text = label.strip().upper()
        if text == "A":
            return LABEL_A
        if text == "B":
            return LABEL_B
        if text.startswith("C") and text[1:].isdigit():
            return int(text[1:])
    raise InvalidPartitionError(f"unknown block label {label!r}")


@dataclass(frozen=True)
class Partition:
    """Total labeling of H_n into A, C_1..C_k, B"""

    dimension: int
    labels: Tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidPartitionError(f"k = {self.k}, the inequality needs k >= 2")
        if len(self.labels) != 1 << self.dimension:
            raise InvalidPartitionError(
                f"labeling covers {len(self.labels)} points, H_{self.dimension} has {1 << self.dimension}"
            )
        for v, label in enumerate(self.labels):
            if label != LABEL_B and not 0 <= label <= self.k:
                raise InvalidPartitionError(
                    f"point {point_to_string(v, self.dimension)} has label {label} outside A, B, C1..C{self.k}"
                )

    def block(self, label: int) -> PointSet:
        return PointSet.from_indices(self.dimension, (v for v, x in enumerate(self.labels) if x == label))

    @cached_property
    def a(self) -> PointSet:
        return self.block(LABEL_A)

    @cached_property
    def b(self) -> PointSet:
        return self.block(LABEL_B)

    @cached_property
    def c(self) -> Tuple[PointSet, ...]:
        return tuple(self.block(i) for i in range(1, self.k + 1))


# ==================== CONSTRUCTION AND VALIDATION ====================

def validate_partition(
    n: int,
    labels: Union[Sequence[LabelLike], Mapping],
    k: Optional[int] = None,
) -> Partition:
    """Build a Partition after checking totality, k >= 2 and that every A ∪ C_i is an upset.

    `labels` is a dense sequence indexed by point, or a mapping from point
    (index, Point or binary string) to label. k defaults to the largest C
    index used; pass it explicitly to allow trailing empty C blocks.
    """
    size = 1 << n
    if isinstance(labels, Mapping):
        dense: List[Optional[int]] = [None] * size
        for key, label in labels.items():
            if isinstance(key, Point):
                index = key.bits
            elif isinstance(key, str):
                if len(key) != n:
                    raise InvalidPartitionError(f"point {key!r} does not have length {n}")
                index = point_from_string(key)
            else:
                index = int(key)
            if not 0 <= index < size:
                raise InvalidPartitionError(f"point index {index} outside H_{n}")
            dense[index] = parse_label(label)
        missing = [point_to_string(v, n) for v, x in enumerate(dense) if x is None]
        if missing:
            raise InvalidPartitionError(f"labeling is not total; unlabeled points: {missing[:8]}")
        coded = tuple(x for x in dense if x is not None)
    else:
        if len(labels) != size:
            raise InvalidPartitionError(f"labeling covers {len(labels)} points, H_{n} has {size}")
        coded = tuple(parse_label(x) for x in labels)

    if k is None:
        k = max((x for x in coded if x > 0), default=0)
    partition = Partition(n, coded, k)

    for i, block in enumerate(partition.c, start=1):
        witness = upset_witness(partition.a.union(block))
        if witness is not None:
            v, w = witness
            raise InvalidPartitionError(
                f"A ∪ C{i} is not closed upwards",
                block=f"C{i}",
                witness=(point_to_string(v, n), point_to_string(w, n)),
            )

    # Implied by k >= 2: A is the intersection of the A ∪ C_i, B the complement of their union.
    witness = upset_witness(partition.a)
    if witness is not None:
        raise InvalidPartitionError("A is not closed upwards", block="A",
                                    witness=tuple(point_to_string(x, n) for x in witness))
    witness = downset_witness(partition.b)
    if witness is not None:
        raise InvalidPartitionError("B is not closed downwards", block="B",
                                    witness=tuple(point_to_string(x, n) for x in witness))

    logger.debug(f"[STRONG] Validated partition of H_{n} with k={k}")
    return partition


def _as_point_set(n: int, block: BlockLike) -> PointSet:
    if isinstance(block, PointSet):
        if block.dimension != n:
            raise DimensionMismatchError(block.dimension, n)
        return block
    return PointSet.from_strings(n, block)


def partition_from_blocks(n: int, a: BlockLike, b: BlockLike, cs: Sequence[BlockLike]) -> Partition:
    """Partition from explicit blocks (PointSets or lists of binary strings)"""
    labels: List[Optional[int]] = [None] * (1 << n)
    blocks = [(LABEL_A, a), (LABEL_B, b)] + [(i, c) for i, c in enumerate(cs, start=1)]
    for label, block in blocks:
        for v in _as_point_set(n, block):
            if labels[v] is not None:
                raise InvalidPartitionError(
                    f"point {point_to_string(v, n)} is in both {label_name(labels[v])} and {label_name(label)}"
                )
            labels[v] = label
    return validate_partition(n, {v: x for v, x in enumerate(labels) if x is not None}, k=len(cs))


# ==================== THE INEQUALITY ====================

def e2(values: Sequence[Fraction]) -> Fraction:
    """Second elementary symmetric polynomial, ((Σx)² − Σx²)/2"""
    if len(values) < 2:
        raise FkgLabError(f"e2 needs at least 2 arguments, got {len(values)}")
    total = sum(values, Fraction(0))
    squares = sum((x * x for x in values), Fraction(0))
    return (total * total - squares) / 2


def block_masses(measure: Measure, partition: Partition) -> Tuple[Fraction, Fraction, Tuple[Fraction, ...]]:
    """(μ(A), μ(B), (μ(C_1), ..., μ(C_k)))"""
    if measure.dimension != partition.dimension:
        raise DimensionMismatchError(measure.dimension, partition.dimension)
    sums = [Fraction(0)] * (partition.k + 2)
    for weight, label in zip(measure.weights, partition.labels):
        if weight:
            sums[label + 1] += weight  # B=-1 -> 0, A=0 -> 1, C_i -> i+1
    return sums[1], sums[0], tuple(sums[2:])


def check_strong_inequality(measure: Measure, partition: Partition) -> InequalityReport:
    """Exact verdict for any measure; a holding verdict is only guaranteed for UI measures"""
    mass_a, mass_b, mass_c = block_masses(measure, partition)
    report = InequalityReport.compare(mass_a * mass_b, e2(mass_c))
    logger.debug(f"[STRONG] lhs={report.lhs} rhs={report.rhs} verdict={report.verdict.value}")
    return report


def k2_identity_check(measure: Measure, partition: Partition) -> Tuple[Fraction, Fraction]:
    """(μ(A)μ(B) − μ(C1)μ(C2), μ(E1∩E2) − μ(E1)μ(E2)) with E_i = A ∪ C_i; always equal"""
    if partition.k != 2:
        raise FkgLabError(f"the k = 2 identity needs k = 2, got k = {partition.k}")
    mass_a, mass_b, (mass_c1, mass_c2) = block_masses(measure, partition)
    e1 = partition.a.union(partition.c[0])
    e2_set = partition.a.union(partition.c[1])
    correlation_gap = measure.mass(e1.intersection(e2_set)) - measure.mass(e1) * measure.mass(e2_set)
    return mass_a * mass_b - mass_c1 * mass_c2, correlation_gap


# ==================== INDUCTION TRACE ====================

def induction_trace(measure: Measure, partition: Partition) -> InductionTrace:
    """Classify each fiber (v, v↑) over the last coordinate and sum the projected masses"""
    n = measure.dimension
    if partition.dimension != n:
        raise DimensionMismatchError(n, partition.dimension)
    if n < 1:
        raise FkgLabError("induction_trace needs n >= 1")
    if not is_product_measure(measure):
        raise NotProductMeasureError("induction_trace needs a product measure")

    projected, q = project_last(measure)
    half = 1 << (n - 1)
    k = partition.k
    zero = Fraction(0)
    a0 = b0 = d = zero
    c_plus = [zero] * k
    c_circ = [zero] * k
    c_minus = [zero] * k

    for v in range(half):
        lower = partition.labels[v]
        upper = partition.labels[v + half]
        weight = projected.weights[v]
        if lower == LABEL_A and upper == LABEL_A:
            a0 += weight
        elif lower == LABEL_B and upper == LABEL_B:
            b0 += weight
        elif lower == LABEL_B and upper == LABEL_A:
            d += weight
        elif lower > 0 and upper == LABEL_A:
            c_plus[lower - 1] += weight
        elif lower > 0 and upper == lower:
            c_circ[lower - 1] += weight
        elif lower == LABEL_B and upper > 0:
            c_minus[upper - 1] += weight
        else:
            raise IllegalFiberError(point_to_string(v, n - 1), label_name(lower), label_name(upper))

    mass_a, mass_b, mass_c = block_masses(measure, partition)
    return InductionTrace(
        a0=a0, b0=b0, d=d,
        c_plus=tuple(c_plus), c_circ=tuple(c_circ), c_minus=tuple(c_minus),
        q=q, mass_a=mass_a, mass_b=mass_b, mass_c=mass_c,
    )


def _recomposes(trace: InductionTrace, p: Fraction) -> bool:
    """Block masses as the affine-in-p combinations, p = mass of the upper face"""
    if trace.mass_a != trace.a0 + p * (trace.d + sum(trace.c_plus)):
        return False
    if trace.mass_b != trace.b0 + (1 - p) * (trace.d + sum(trace.c_minus)):
        return False
    return all(
        observed == circ + p * minus + (1 - p) * plus
        for observed, circ, plus, minus in zip(trace.mass_c, trace.c_circ, trace.c_plus, trace.c_minus)
    )


def verify_induction_step(trace: InductionTrace) -> InductionVerdict:
    """Check the proof obligations of the induction step as exact inequalities"""
    failed = []
    k = trace.k
    sum_plus = sum(trace.c_plus, Fraction(0))
    sum_minus = sum(trace.c_minus, Fraction(0))
    total = trace.a0 + trace.b0 + trace.d + sum_plus + sum_minus + sum(trace.c_circ, Fraction(0))
    if total != 1:
        failed.append("sum-to-one")

    # Induction hypotheses on the two coarsenings of H_{n-1}
    upper = (trace.a0 + trace.d + sum_plus) * trace.b0
    if upper < e2([trace.c_circ[i] + trace.c_minus[i] for i in range(k)]):
        failed.append("induction-hypothesis-upper")
    lower = trace.a0 * (trace.b0 + trace.d + sum_minus)
    if lower < e2([trace.c_circ[i] + trace.c_plus[i] for i in range(k)]):
        failed.append("induction-hypothesis-lower")

    # Leading coefficient of the quadratic in p
    leading = -(trace.d + sum_plus) * (trace.d + sum_minus)
    if leading > e2([trace.c_minus[i] - trace.c_plus[i] for i in range(k)]):
        failed.append("quadratic-coefficient")

    one_face = _recomposes(trace, 1 - trace.q)
    zero_face = _recomposes(trace, trace.q)
    if one_face and zero_face:
        orientation = "symmetric"
    elif one_face:
        orientation = "one-face"
    elif zero_face:
        orientation = "zero-face"
    else:
        orientation = None
        failed.append("recomposition")

    verdict = Verdict.VIOLATED if failed else Verdict.HOLDS
    if failed:
        logger.warning(f"[STRONG] Induction step fails obligations: {failed}")
    return InductionVerdict(verdict=verdict, failed=failed, orientation=orientation)


# ==================== PARTITION GENERATORS ====================

def _allowed_labels(cover_labels: List[int], k: int) -> List[int]:
    """Labels a point may take given the labels of its upper covers"""
    outside_a = {x for x in cover_labels if x != LABEL_A}
    allowed = [LABEL_B]
    if not outside_a:
        allowed.append(LABEL_A)
        allowed.extend(range(1, k + 1))
    elif len(outside_a) == 1:
        (only,) = outside_a
        if only > 0:
            allowed.append(only)
    return allowed


def _covers(n: int) -> List[List[int]]:
    return [list(PointSet(upper_cover_mask(v, n), n)) for v in range(1 << n)]


def nonempty_c_blocks(partition: Partition) -> int:
    """Number of nonempty C blocks; below two the right-hand side e2 vanishes"""
    return len({label for label in partition.labels if label > 0})


def _partition_from_upsets(n: int, upsets: Sequence[PointSet]) -> Partition:
    """A = points in two or more V_i, C_i = V_i \\ A, B = points in no V_i"""
    labels = [LABEL_B] * (1 << n)
    for i, upset in enumerate(upsets, start=1):
        for v in upset:
            labels[v] = i if labels[v] == LABEL_B else LABEL_A
    return Partition(n, tuple(labels), len(upsets))


def random_partition(n: int, k: int, rng: random.Random, attempts: Optional[int] = None) -> Partition:
    """Random valid partition built from k uniform random upsets V_1..V_k.

    Every valid partition arises this way with V_i = A ∪ C_i, and the
    union of the pairwise intersections V_i ∩ V_j is an upset, so no draw
    is rejected. Draws with fewer than two nonempty C blocks are redrawn
    up to `attempts` times (settings.partition_draw_attempts by default);
    H_1 has no other kind.
    """
    if k < 2:
        raise InvalidPartitionError(f"k = {k}, the inequality needs k >= 2")
    attempts = settings.partition_draw_attempts if attempts is None else attempts
    partition = _partition_from_upsets(n, [upset_catalog.random_upset(n, rng) for _ in range(k)])
    for _ in range(attempts - 1):
        if n < 2 or nonempty_c_blocks(partition) >= 2:
            break
        partition = _partition_from_upsets(n, [upset_catalog.random_upset(n, rng) for _ in range(k)])
    return partition


def enumerate_partitions(n: int, k: int) -> Iterator[Partition]:
    """Every valid partition of H_n with k C-blocks, once per permutation class of the C labels"""
    if k < 2:
        raise InvalidPartitionError(f"k = {k}, the inequality needs k >= 2")
    covers = _covers(n)
    order = topological_order(n)[::-1]
    labels = [LABEL_B] * (1 << n)

    def extend(position: int, highest: int) -> Iterator[Partition]:
        if position == len(order):
            yield Partition(n, tuple(labels), k)
            return
        v = order[position]
        for label in _allowed_labels([labels[w] for w in covers[v]], k):
            if label > highest + 1:
                continue  # C labels appear in first-use order
            labels[v] = label
            yield from extend(position + 1, max(highest, label))
        labels[v] = LABEL_B

    yield from extend(0, 0)
