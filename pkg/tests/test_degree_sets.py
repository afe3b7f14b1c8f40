from fractions import Fraction

import pytest

from fkglab.exceptions import CapacityError, InvalidMeasureError
from fkglab.models.schemas import Verdict
from fkglab.services.degree_sets import (
    adjacency_rows,
    check_central_bound,
    check_degree_corollary,
    corollary_prefactor,
    degree_set_size,
    distribution_rows,
    exact_degree_distribution,
    graph_edges,
    is_complement_symmetric,
    mc_degree_distribution,
    prefactor_comparison,
)

from tests.oracles import degree_distribution_brute


def test_graph_edges_and_rows():
    assert graph_edges(3) == [(0, 1), (0, 2), (1, 2)]
    assert adjacency_rows(3) == [0b011, 0b101, 0b110]


def test_degree_set_size():
    assert degree_set_size(0b1, 1) == 2
    assert degree_set_size(0b0, 1) == 0
    # 4 vertices, only edge (0, 1): two vertices of degree 1 < 2
    assert degree_set_size(0b1, 2) == 0


def test_small_distributions():
    assert exact_degree_distribution(0).probs == (Fraction(1),)
    assert exact_degree_distribution(1).probs == (Fraction(1, 2), Fraction(0), Fraction(1, 2))


@pytest.mark.parametrize("n", [1, 2])
def test_exact_matches_brute_force(n):
    assert list(exact_degree_distribution(n).probs) == degree_distribution_brute(n)


def test_exact_is_the_same_with_several_workers():
    assert exact_degree_distribution(2, workers=2) == exact_degree_distribution(2, workers=1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_distribution_is_complement_symmetric(n):
    assert is_complement_symmetric(exact_degree_distribution(n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_corollary_holds_for_every_k(n):
    dist = exact_degree_distribution(n)
    for k in range(2 * n + 1):
        assert check_degree_corollary(dist, k).holds


def test_corollary_at_n1():
    report = check_degree_corollary(exact_degree_distribution(1), 1)
    assert (report.lhs, report.rhs) == (Fraction(1, 4), Fraction(0))


def test_corollary_rejects_k_out_of_range():
    with pytest.raises(InvalidMeasureError):
        check_degree_corollary(exact_degree_distribution(1), 3)


def test_central_bound_at_n1():
    report = check_central_bound(exact_degree_distribution(1))
    assert (report.lhs, report.rhs) == (Fraction(1), Fraction(0))
    assert report.verdict == Verdict.HOLDS
    assert report.limit_display == "0.414214"
    assert report.cap_display == "0.5"


@pytest.mark.parametrize("n", [2, 3])
def test_central_bound_holds(n):
    assert check_central_bound(exact_degree_distribution(n)).verdict == Verdict.HOLDS


def test_prefactors():
    assert corollary_prefactor(4) == Fraction(3, 8)
    assert prefactor_comparison(2).lhs == prefactor_comparison(2).rhs == Fraction(1, 4)
    for c in range(1, 50):
        assert prefactor_comparison(c).holds
    with pytest.raises(InvalidMeasureError):
        prefactor_comparison(0)


def test_distribution_rows():
    rows = distribution_rows(exact_degree_distribution(1))
    assert rows[0] == (0, Fraction(1, 2), "0.5")
    assert rows[1][1] == 0


def test_capacity_limits():
    with pytest.raises(CapacityError):
        exact_degree_distribution(4)
    with pytest.raises(CapacityError):
        exact_degree_distribution(5, force=True)
    with pytest.raises(InvalidMeasureError):
        exact_degree_distribution(-1)


def test_monte_carlo_covers_the_exact_distribution():
    dist = exact_degree_distribution(2)
    exact = {str(k): p for k, p in enumerate(dist.probs)}
    estimate = mc_degree_distribution(2, samples=50_000, seed=19)
    assert set(estimate.counts) == {"0", "1", "2", "3", "4"}
    assert estimate.covers(exact)


def test_monte_carlo_is_reproducible():
    assert mc_degree_distribution(2, 3000, seed=4) == mc_degree_distribution(2, 3000, seed=4)


def test_monte_carlo_single_sample():
    estimate = mc_degree_distribution(1, samples=1, seed=0)
    assert estimate.counts["1"] == 0
    assert estimate.counts["0"] + estimate.counts["2"] == 1


def test_monte_carlo_needs_samples():
    with pytest.raises(InvalidMeasureError):
        mc_degree_distribution(2, samples=0, seed=1)


def test_all_but_one_vertex_is_possible_from_n2():
    # triangle on 0, 1, 2 plus the edge (0, 3): degrees 3, 2, 2, 1
    assert degree_set_size(0b1111, 2) == 3
    assert exact_degree_distribution(1).probs[1] == 0
    assert exact_degree_distribution(2).probs[3] > 0
