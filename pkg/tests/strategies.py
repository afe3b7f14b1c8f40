"""
Hypothesis strategies for exact measures, partitions and graphs
"""
import random
from fractions import Fraction

import hypothesis.strategies as st

from fkglab.services.measures import Measure, ising_measure, product_measure
from fkglab.services.percolation import random_graph
from fkglab.services.realization import random_monotone_realization
from fkglab.services.strong_inequality import random_partition


@st.composite
def unit_rationals(draw, max_denominator: int = 12):
    """Rationals strictly inside (0, 1)"""
    denominator = draw(st.integers(2, max_denominator))
    return Fraction(draw(st.integers(1, denominator - 1)), denominator)


@st.composite
def product_measures(draw, min_n: int = 0, max_n: int = 4):
    n = draw(st.integers(min_n, max_n))
    return product_measure([draw(unit_rationals()) for _ in range(n)])


@st.composite
def measure_and_partition(draw, min_n: int = 1, max_n: int = 4, max_k: int = 4):
    measure = draw(product_measures(min_n, max_n))
    k = draw(st.integers(2, max_k))
    rng = draw(st.randoms(use_true_random=False))
    return measure, random_partition(measure.dimension, k, rng)


@st.composite
def ising_measures(draw, max_n: int = 3):
    n = draw(st.integers(1, max_n))
    couplings = [[Fraction(1)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            couplings[i][j] = couplings[j][i] = 1 + Fraction(draw(st.integers(0, 5)), draw(st.integers(1, 5)))
    fields = [Fraction(draw(st.integers(1, 6)), draw(st.integers(1, 6))) for _ in range(n)]
    return ising_measure(couplings, fields)


@st.composite
def small_graphs(draw, max_edges: int = 6):
    """(graph, terminals) pairs small enough for brute force"""
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(random.Random(seed), max_edges=max_edges, max_vertices=5)


@st.composite
def monotone_realizations(draw, max_m: int = 3, max_n: int = 3):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    return random_monotone_realization(m, n, draw(st.randoms(use_true_random=False)))


@st.composite
def wide_denominator_measures(draw, max_n: int = 3):
    """Full-support measures whose common denominator is usually around 2^35"""
    n = draw(st.integers(1, max_n))
    raw = [draw(st.integers(1, 2**34)) for _ in range(1 << n)]
    total = sum(raw)
    return Measure.from_weights([Fraction(x, total) for x in raw])
