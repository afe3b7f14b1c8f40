from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
import hypothesis.strategies as st

from fkglab.exceptions import CapacityError, InvalidMeasureError, ZeroMassConditionError
from fkglab.services.lattice import Point, PointSet
from fkglab.services.measures import (
    Measure,
    check_fkg_property,
    check_positive_association,
    conditional_zero_prob,
    conditional_zero_table,
    derangement_numbers,
    fixed_point_measure,
    ising_measure,
    is_product_measure,
    marginals,
    mix_with_uniform,
    point_mass,
    prefix_marginals,
    product_measure,
    project_last,
    uniform_measure,
)

from tests.oracles import fixed_point_weights_brute, fkg_holds_brute, positive_association_holds_brute
from tests.strategies import ising_measures, product_measures, unit_rationals, wide_denominator_measures


def test_derangement_numbers():
    assert derangement_numbers(5) == [1, 0, 1, 2, 9, 44]


def test_fixed_point_measure_values(mu3):
    assert mu3.weight(Point.from_string("000")) == Fraction(1, 3)
    for text in ("100", "010", "001", "111"):
        assert mu3.weight(Point.from_string(text)) == Fraction(1, 6)
    for text in ("110", "101", "011"):
        assert mu3.weight(Point.from_string(text)) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_fixed_point_measure_never_misses_exactly_one(n):
    measure = fixed_point_measure(n)
    assert sum(measure.weights) == 1
    assert all(w == 0 for v, w in enumerate(measure.weights) if v.bit_count() == n - 1)


def test_fixed_point_measure_fails_fkg_at_singletons(mu3):
    violation = check_fkg_property(mu3)
    assert violation is not None
    assert violation.a == "100"
    assert violation.b == "010"
    assert violation.lhs == 0
    assert violation.rhs == Fraction(1, 36)


def test_fixed_point_measure_is_positively_associated(mu3):
    assert check_positive_association(mu3) is None


def test_fkg_scan_is_the_same_with_workers(mu3):
    assert check_fkg_property(mu3, workers=2) == check_fkg_property(mu3, workers=1)


def test_anticorrelated_measure_violates_positive_association():
    measure = Measure.from_weights([0, "1/2", "1/2", 0])
    violation = check_positive_association(measure)
    assert violation is not None
    e1 = PointSet.from_strings(measure.dimension, violation.e1)
    e2 = PointSet.from_strings(measure.dimension, violation.e2)
    expected = measure.mass(e1) * measure.mass(e2) - measure.mass(e1.intersection(e2))
    assert violation.gap == expected > 0


def test_large_denominators_use_exact_integers():
    # lcm of the denominators is beyond int64 itself
    big = 2**40 + 15
    measure = product_measure([Fraction(1, big), Fraction(3, big + 2)])
    assert check_positive_association(measure) is None


@given(product_measures(max_n=4))
def test_product_measures_satisfy_fkg(measure):
    assert check_fkg_property(measure) is None
    assert fkg_holds_brute(measure.weights)
    assert is_product_measure(measure)


@given(product_measures(max_n=3))
def test_product_measures_are_positively_associated(measure):
    assert check_positive_association(measure) is None


@given(ising_measures())
def test_ising_measures_satisfy_fkg(measure):
    assert check_fkg_property(measure) is None
    assert measure.has_full_support()


def test_ising_two_spins():
    measure = ising_measure([[1, 2], [2, 1]], [1, 1])
    assert measure.weights == (Fraction(1, 5), Fraction(1, 5), Fraction(1, 5), Fraction(2, 5))
    assert not is_product_measure(measure)


@pytest.mark.parametrize(
    "couplings,fields",
    [
        ([[1, "1/2"], ["1/2", 1]], [1, 1]),
        ([[1, 2], [3, 1]], [1, 1]),
        ([[2, 2], [2, 1]], [1, 1]),
        ([[1, 2], [2, 1]], [0, 1]),
    ],
)
def test_ising_rejects_bad_parameters(couplings, fields):
    with pytest.raises(InvalidMeasureError):
        ising_measure(couplings, fields)


def test_measure_validation():
    with pytest.raises(InvalidMeasureError):
        Measure.from_weights(["1/2", "1/3"])
    with pytest.raises(InvalidMeasureError):
        Measure.from_weights(["3/2", "-1/2"])
    with pytest.raises(InvalidMeasureError):
        Measure.from_weights(["1/2", "1/4", "1/4"])


def test_dimension_cap():
    with pytest.raises(CapacityError):
        product_measure([Fraction(1, 2)] * 21)


def test_marginals_and_product():
    measure = product_measure(["1/3", "3/4"])
    assert marginals(measure) == (Fraction(1, 3), Fraction(3, 4))
    assert measure.weight(Point.from_string("11")) == Fraction(1, 4)


def test_project_last(mu3):
    projected, q = project_last(mu3)
    assert q == Fraction(1, 3) + Fraction(1, 6) + Fraction(1, 6) + 0
    assert projected.dimension == 2
    assert projected.weight(Point.from_string("00")) == Fraction(1, 2)
    assert prefix_marginals(mu3, 2) == list(projected.weights)


def test_conditionals(mu3):
    assert conditional_zero_prob(mu3, 1, []) == Fraction(2, 3)
    assert conditional_zero_prob(mu3, 2, [0]) == Fraction(3, 4)
    assert conditional_zero_prob(mu3, 2, [1]) == Fraction(1, 2)
    assert conditional_zero_table(mu3, 2) == [Fraction(3, 4), Fraction(1, 2)]


def test_conditioning_on_a_null_event():
    measure = point_mass(Point.from_string("11"))
    with pytest.raises(ZeroMassConditionError):
        conditional_zero_prob(measure, 2, [0])


def test_mix_with_uniform_gives_full_support():
    measure = mix_with_uniform(point_mass(Point.from_string("10")), "1/10")
    assert measure.has_full_support()
    assert measure.weight(Point.from_string("10")) == Fraction(9, 10) + Fraction(1, 40)


def test_mass_and_support(uniform_h2):
    assert uniform_h2.mass(PointSet.from_strings(2, ["11", "10"])) == Fraction(1, 2)
    assert len(uniform_h2.support()) == 4
    assert uniform_measure(0).weights == (Fraction(1),)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_fixed_point_measure_matches_permutation_count(n):
    assert list(fixed_point_measure(n).weights) == fixed_point_weights_brute(n)


def test_fixed_point_measure_on_h4_by_rank():
    measure = fixed_point_measure(4)
    by_rank = {v.bit_count(): w for v, w in enumerate(measure.weights)}
    assert by_rank == {
        0: Fraction(3, 8),
        1: Fraction(1, 12),
        2: Fraction(1, 24),
        3: Fraction(0),
        4: Fraction(1, 24),
    }
    assert all(w == by_rank[v.bit_count()] for v, w in enumerate(measure.weights))


@given(ising_measures(max_n=4))
def test_ising_measures_are_positively_associated(measure):
    assert check_fkg_property(measure) is None
    assert check_positive_association(measure) is None


@given(ising_measures(max_n=4))
def test_fkg_conditionals_do_not_increase_along_the_prefix(measure):
    for i in range(2, measure.dimension + 1):
        prefixes = list(product((0, 1), repeat=i - 1))
        for lower in prefixes:
            for upper in prefixes:
                if all(x <= y for x, y in zip(lower, upper)):
                    assert conditional_zero_prob(measure, i, lower) >= conditional_zero_prob(measure, i, upper)


@given(st.lists(unit_rationals(), min_size=1, max_size=5))
def test_project_last_of_a_product(p):
    projected, q = project_last(product_measure(p))
    assert projected == product_measure(p[:-1])
    assert q == 1 - p[-1]


@given(wide_denominator_measures())
def test_wide_denominators_agree_with_brute_force(measure):
    violation = check_positive_association(measure)
    assert (violation is None) == positive_association_holds_brute(measure.weights, measure.dimension)
    if violation is not None:
        e1 = PointSet.from_strings(measure.dimension, violation.e1)
        e2 = PointSet.from_strings(measure.dimension, violation.e2)
        assert violation.gap == measure.mass(e1) * measure.mass(e2) - measure.mass(e1.intersection(e2))


def test_product_with_denominators_97_to_101():
    measure = product_measure([Fraction(1, d) for d in range(97, 102)])
    assert check_positive_association(measure) is None


def test_anticorrelation_found_at_a_35_bit_scale():
    scale = 2**35 + 53
    measure = Measure.from_weights([0, Fraction(scale - 1, scale), Fraction(1, scale), 0])
    violation = check_positive_association(measure)
    assert violation is not None
    assert violation.gap == Fraction(scale - 1, scale) * Fraction(1, scale)


def test_violation_reports_carry_bit_strings(mu3):
    fkg = check_fkg_property(mu3)
    assert fkg.model_dump(mode="json") == {"a": "100", "b": "010", "lhs": "0", "rhs": "1/36"}
    association = check_positive_association(Measure.from_weights([0, "1/2", "1/2", 0]))
    dumped = association.model_dump(mode="json")
    assert all(isinstance(text, str) for text in dumped["e1"] + dumped["e2"])
    assert dumped["gap"] == "1/4"


def test_report_models_do_not_import_services():
    import fkglab.models.schemas as schemas

    source = open(schemas.__file__, encoding="utf-8").read()
    assert "fkglab.services" not in source
