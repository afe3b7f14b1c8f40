"""
Shared fixtures for the fkglab test suite
"""
from fractions import Fraction

import pytest
from hypothesis import settings as hypothesis_settings

from fkglab.services.measures import fixed_point_measure, uniform_measure
from fkglab.services.percolation import path_graph, triangle_graph
from fkglab.services.strong_inequality import partition_from_blocks

hypothesis_settings.register_profile("fkglab", deadline=None, max_examples=40)
hypothesis_settings.load_profile("fkglab")


@pytest.fixture
def mu3():
    return fixed_point_measure(3)


@pytest.fixture
def mu3_partition():
    """A = {|S| >= 2}, C_i = {{i}}, B = {∅}"""
    return partition_from_blocks(
        3,
        a=["110", "101", "011", "111"],
        b=["000"],
        cs=[["100"], ["010"], ["001"]],
    )


@pytest.fixture
def rank_partition_h2():
    return partition_from_blocks(2, a=["11"], b=["00"], cs=[["10"], ["01"]])


@pytest.fixture
def uniform_h2():
    return uniform_measure(2)


@pytest.fixture
def triangle():
    return triangle_graph(Fraction(1, 2))


@pytest.fixture
def path():
    return path_graph(Fraction(1, 2))
