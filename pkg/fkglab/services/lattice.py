"""
Points of the hypercube H_n, lattice operations and upset machinery.

Coordinate i (1-based) is bit i-1 of an unsigned integer. A binary
string of length n lists coordinates left to right, so "110" is the
point with coordinates 1 and 2 set (bits = 0b011). Point sets are dense
bit tables: bit v of `table` is set iff point v is a member.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from fkglab.config import settings
from fkglab.exceptions import CapacityError, DimensionMismatchError, FkgLabError

logger = logging.getLogger(__name__)

PointLike = Union["Point", int]


def point_to_string(index: int, dimension: int) -> str:
    return "".join("1" if (index >> i) & 1 else "0" for i in range(dimension))


def point_from_string(text: str) -> int:
    if any(ch not in "01" for ch in text):
        raise FkgLabError(f"not a binary point string: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


@dataclass(frozen=True)
class Point:
    """A vertex of H_n"""

    bits: int
    dimension: int

    def __post_init__(self):
        if self.dimension < 0:
            raise FkgLabError(f"dimension must be nonnegative, got {self.dimension}")
        if self.bits < 0 or self.bits >> self.dimension:
            raise FkgLabError(f"bits {self.bits:#b} do not fit dimension {self.dimension}")

    @classmethod
    def from_string(cls, text: str) -> "Point":
        return cls(point_from_string(text), len(text))

    @classmethod
    def from_support(cls, support: Iterable[int], dimension: int) -> "Point":
        """Point whose set coordinates (1-based) are `support`"""
        return cls(sum(1 << (i - 1) for i in set(support)), dimension)

    def to_string(self) -> str:
        return point_to_string(self.bits, self.dimension)

    def coordinate(self, i: int) -> int:
        """Value of coordinate i (1-based)"""
        return (self.bits >> (i - 1)) & 1

    @property
    def rank(self) -> int:
        return self.bits.bit_count()

    def support(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in range(self.dimension) if (self.bits >> i) & 1)

    def __str__(self) -> str:
        return self.to_string()


def _same_dimension(a: Point, b: Point) -> int:
    if a.dimension != b.dimension:
        raise DimensionMismatchError(a.dimension, b.dimension)
    return a.dimension


def join(a: Point, b: Point) -> Point:
    """Coordinatewise maximum"""
    return Point(a.bits | b.bits, _same_dimension(a, b))


def meet(a: Point, b: Point) -> Point:
    """Coordinatewise minimum"""
    return Point(a.bits & b.bits, _same_dimension(a, b))


def leq(a: Point, b: Point) -> bool:
    return meet(a, b) == a


@lru_cache(maxsize=None)
def zero_face_mask(dimension: int, bit: int) -> int:
    """Bit table of all points of H_n whose coordinate `bit` (0-based) is 0"""
    half = 1 << bit
    mask = (1 << half) - 1
    length = half << 1
    size = 1 << dimension
    while length < size:
        mask |= mask << length
        length <<= 1
    return mask


@lru_cache(maxsize=None)
def full_table(dimension: int) -> int:
    return (1 << (1 << dimension)) - 1


@dataclass(frozen=True)
class PointSet:
    """Dense subset of H_n"""

    table: int
    dimension: int

    def __post_init__(self):
        if self.dimension < 0:
            raise FkgLabError(f"dimension must be nonnegative, got {self.dimension}")
        if self.table < 0 or self.table >> (1 << self.dimension):
            raise FkgLabError("bit table longer than 2^n")

    @classmethod
    def empty(cls, dimension: int) -> "PointSet":
        return cls(0, dimension)

    @classmethod
    def full(cls, dimension: int) -> "PointSet":
        return cls(full_table(dimension), dimension)

    @classmethod
    def from_indices(cls, dimension: int, indices: Iterable[int]) -> "PointSet":
        table = 0
        for index in indices:
            if index < 0 or index >> dimension:
                raise FkgLabError(f"point index {index} outside H_{dimension}")
            table |= 1 << index
        return cls(table, dimension)

    @classmethod
    def from_strings(cls, dimension: int, strings: Iterable[str]) -> "PointSet":
        indices = []
        for text in strings:
            if len(text) != dimension:
                raise FkgLabError(f"point {text!r} has length {len(text)}, expected {dimension}")
            indices.append(point_from_string(text))
        return cls.from_indices(dimension, indices)

    def __contains__(self, point: PointLike) -> bool:
        if isinstance(point, Point):
            if point.dimension != self.dimension:
                raise DimensionMismatchError(point.dimension, self.dimension)
            point = point.bits
        return bool((self.table >> point) & 1)

    def __iter__(self) -> Iterator[int]:
        table = self.table
        while table:
            low = table & -table
            yield low.bit_length() - 1
            table ^= low

    def __len__(self) -> int:
        return self.table.bit_count()

    def members(self) -> List[Point]:
        return [Point(v, self.dimension) for v in self]

    def to_strings(self) -> List[str]:
        return [point_to_string(v, self.dimension) for v in self]

    def _other(self, other: "PointSet") -> int:
        if other.dimension != self.dimension:
            raise DimensionMismatchError(self.dimension, other.dimension)
        return other.table

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.table | self._other(other), self.dimension)

    def intersection(self, other: "PointSet") -> "PointSet":
        return PointSet(self.table & self._other(other), self.dimension)

    def difference(self, other: "PointSet") -> "PointSet":
        return PointSet(self.table & ~self._other(other), self.dimension)

    def complement(self) -> "PointSet":
        return PointSet(full_table(self.dimension) & ~self.table, self.dimension)

    def __str__(self) -> str:
        return "{" + ", ".join(self.to_strings()) + "}"


def upset_witness(points: PointSet) -> Optional[Tuple[int, int]]:
    """First covering pair (v, w) with v in the set, w = v plus one coordinate, w missing.

    Word-parallel: shifting the zero face of coordinate i by 2^i maps
    every v with bit i clear onto v | 1 << i.
    """
    n = points.dimension
    table = points.table
    for i in range(n):
        shift = 1 << i
        missing = ((table & zero_face_mask(n, i)) << shift) & ~table
        if missing:
            w = (missing & -missing).bit_length() - 1
            return w - shift, w
    return None


def downset_witness(points: PointSet) -> Optional[Tuple[int, int]]:
    """First pair (v, w) with v in the set, w = v minus one coordinate, w missing"""
    n = points.dimension
    table = points.table
    for i in range(n):
        shift = 1 << i
        one_face = full_table(n) & ~zero_face_mask(n, i)
        missing = ((table & one_face) >> shift) & ~table
        if missing:
            w = (missing & -missing).bit_length() - 1
            return w + shift, w
    return None


def is_upset(points: PointSet) -> bool:
    return upset_witness(points) is None


def is_downset(points: PointSet) -> bool:
    return downset_witness(points) is None


def topological_order(dimension: int) -> List[int]:
    """Points sorted by popcount, then by value"""
    return sorted(range(1 << dimension), key=lambda v: (v.bit_count(), v))


def upper_cover_mask(v: int, dimension: int) -> int:
    """Bit table of the upper covers of v"""
    mask = 0
    for i in range(dimension):
        if not (v >> i) & 1:
            mask |= 1 << (v | (1 << i))
    return mask


def enumerate_upsets(n: int) -> Tuple[PointSet, ...]:
    """All upward-closed subsets of H_n, each exactly once.

    Points are decided top-down (reverse topological order); a point may
    join only when all its upper covers already have, so every branch ends
    in a distinct upset and no branch is a dead end.
    """
    if n < 0:
        raise FkgLabError(f"dimension must be nonnegative, got {n}")
    if n > settings.upset_enumeration_cap:
        raise CapacityError(
            "upset enumeration dimension", n, settings.upset_enumeration_cap,
            "the number of upsets grows as the Dedekind numbers",
        )

    order = topological_order(n)[::-1]
    covers = [upper_cover_mask(v, n) for v in range(1 << n)]
    size = len(order)
    found: List[PointSet] = []

    def extend(position: int, table: int) -> None:
        if position == size:
            found.append(PointSet(table, n))
            return
        v = order[position]
        extend(position + 1, table)
        if table & covers[v] == covers[v]:
            extend(position + 1, table | (1 << v))

    extend(0, 0)
    logger.info(f"[LATTICE] Enumerated {len(found)} upsets of H_{n}")
    return tuple(found)
