from itertools import product

import pytest
from hypothesis import given
import hypothesis.strategies as st

from fkglab.exceptions import CapacityError, DimensionMismatchError, FkgLabError
from fkglab.services.lattice import (
    Point,
    PointSet,
    downset_witness,
    enumerate_upsets,
    is_downset,
    is_upset,
    join,
    leq,
    meet,
    point_from_string,
    point_to_string,
    topological_order,
    upset_witness,
)
from fkglab.services.upset_catalog import UpsetCatalog

from tests.oracles import all_upsets_brute, is_upset_brute


def test_string_lists_coordinates_left_to_right():
    point = Point.from_string("110")
    assert point.bits == 0b011
    assert point.coordinate(1) == 1
    assert point.coordinate(2) == 1
    assert point.coordinate(3) == 0
    assert point.support() == (1, 2)
    assert point.rank == 2
    assert str(point) == "110"


def test_string_round_trip():
    for v in range(16):
        assert point_from_string(point_to_string(v, 4)) == v


def test_from_support():
    assert Point.from_support([3], 3).to_string() == "001"


def test_rejects_non_binary_strings():
    with pytest.raises(FkgLabError):
        point_from_string("102")


def test_join_meet_leq():
    a = Point.from_string("100")
    b = Point.from_string("010")
    assert join(a, b).to_string() == "110"
    assert meet(a, b).to_string() == "000"
    assert leq(meet(a, b), a)
    assert not leq(a, b)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_join_and_meet_obey_the_lattice_laws(n):
    points = [Point(v, n) for v in range(1 << n)]
    for a, b in product(points, repeat=2):
        assert join(a, b) == join(b, a)
        assert meet(a, b) == meet(b, a)
        assert join(a, meet(a, b)) == a
        assert meet(a, join(a, b)) == a
        assert leq(a, b) == (join(a, b) == b) == (meet(a, b) == a)
    for a, b, c in product(points, repeat=3):
        assert join(join(a, b), c) == join(a, join(b, c))
        assert meet(meet(a, b), c) == meet(a, meet(b, c))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        join(Point.from_string("10"), Point.from_string("100"))


def test_point_set_basics():
    points = PointSet.from_strings(2, ["11", "10"])
    assert len(points) == 2
    assert list(points) == [1, 3]
    assert points.to_strings() == ["10", "11"]
    assert Point.from_string("11") in points
    assert 0 not in points
    assert points.complement().to_strings() == ["00", "01"]
    other = PointSet.from_strings(2, ["01", "11"])
    assert points.union(other).to_strings() == ["10", "01", "11"]
    assert points.intersection(other).to_strings() == ["11"]
    assert points.difference(other).to_strings() == ["10"]


def test_upset_witness_is_a_covering_pair():
    points = PointSet.from_strings(2, ["10"])
    assert upset_witness(points) == (1, 3)
    assert not is_upset(points)
    assert is_upset(PointSet.from_strings(2, ["10", "11"]))


def test_is_upset_on_every_subset_of_h3():
    for table in range(1 << 8):
        points = PointSet(table, 3)
        assert is_upset(points) == is_upset_brute(set(points), 3)
        witness = upset_witness(points)
        if witness is not None:
            v, w = witness
            assert v in points and w not in points and (v ^ w).bit_count() == 1 and v < w


def test_downset_witness():
    points = PointSet.from_strings(2, ["11"])
    witness = downset_witness(points)
    assert witness is not None
    v, w = witness
    assert v == 3 and (v ^ w).bit_count() == 1 and w not in points
    assert is_downset(PointSet.from_strings(2, ["00", "10"]))


@pytest.mark.parametrize("n,count", [(0, 2), (1, 3), (2, 6), (3, 20), (4, 168)])
def test_upset_counts_are_dedekind_numbers(n, count):
    assert len(enumerate_upsets(n)) == count


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_upsets_match_brute_force(n):
    tables = [s.table for s in enumerate_upsets(n)]
    assert len(tables) == len(set(tables))
    assert set(tables) == all_upsets_brute(n)


def test_upset_enumeration_capacity():
    with pytest.raises(CapacityError):
        enumerate_upsets(6)


@given(st.integers(0, 19))
def test_complement_of_upset_is_downset(index):
    upset = enumerate_upsets(3)[index]
    assert is_upset(upset)
    assert is_downset(upset.complement())


def test_topological_order_is_a_linear_extension():
    order = topological_order(3)
    position = {v: i for i, v in enumerate(order)}
    for v in range(8):
        for i in range(3):
            w = v | (1 << i)
            if w != v:
                assert position[v] < position[w]


def test_upset_catalog_caches():
    catalog = UpsetCatalog()
    first = catalog.get_upsets(3)
    second = catalog.get_upsets(3)
    assert first is second
    stats = catalog.get_stats()
    assert stats["hits"] == 1 and stats["misses"] == 1
    assert stats["sizes"] == {3: 20}
    catalog.clear_all()
    assert catalog.get_dimensions() == []
