from fractions import Fraction
import random
from itertools import combinations, product

import pytest
from hypothesis import given
import hypothesis.strategies as st

from fkglab.exceptions import IllegalFiberError, InvalidPartitionError, NotProductMeasureError
from fkglab.models.schemas import Verdict
from fkglab.services.measures import product_measure, uniform_measure
from fkglab.services.strong_inequality import (
    LABEL_A,
    LABEL_B,
    Partition,
    block_masses,
    check_strong_inequality,
    e2,
    enumerate_partitions,
    induction_trace,
    k2_identity_check,
    label_name,
    nonempty_c_blocks,
    parse_label,
    partition_from_blocks,
    random_partition,
    validate_partition,
    verify_induction_step,
)

from tests.oracles import is_valid_labeling_brute
from tests.strategies import measure_and_partition, product_measures


def test_e2():
    assert e2([Fraction(1, 6)] * 3) == Fraction(1, 12)
    assert e2([1, 2, 3]) == 11


@given(st.lists(st.fractions(max_denominator=50), min_size=2, max_size=7))
def test_e2_matches_the_pairwise_sum(values):
    assert e2(values) == sum((x * y for x, y in combinations(values, 2)), Fraction(0))


def test_labels():
    assert parse_label("A") == LABEL_A
    assert parse_label("b") == LABEL_B
    assert parse_label("C3") == 3
    assert label_name(2) == "C2"
    with pytest.raises(InvalidPartitionError):
        parse_label("D")


def test_fixed_point_counterexample(mu3, mu3_partition):
    mass_a, mass_b, mass_c = block_masses(mu3, mu3_partition)
    assert (mass_a, mass_b) == (Fraction(1, 6), Fraction(1, 3))
    assert mass_c == (Fraction(1, 6),) * 3
    report = check_strong_inequality(mu3, mu3_partition)
    assert report.lhs == Fraction(1, 18)
    assert report.rhs == Fraction(1, 12)
    assert report.margin == Fraction(-1, 36)
    assert report.verdict == Verdict.VIOLATED


def test_uniform_rank_partition_is_tight(uniform_h2, rank_partition_h2):
    report = check_strong_inequality(uniform_h2, rank_partition_h2)
    assert report.lhs == report.rhs == Fraction(1, 16)
    assert report.holds


def test_invalid_partition_names_block_and_witness():
    with pytest.raises(InvalidPartitionError) as error:
        partition_from_blocks(2, a=["11"], b=["10", "01"], cs=[["00"], []])
    assert error.value.block == "C1"
    assert error.value.witness == ("00", "10")


def test_partition_must_be_total():
    with pytest.raises(InvalidPartitionError):
        validate_partition(2, {"11": "A", "00": "B", "10": "C1"})


def test_overlapping_blocks_are_rejected():
    with pytest.raises(InvalidPartitionError):
        partition_from_blocks(2, a=["11"], b=["00", "11"], cs=[["10"], ["01"]])


def test_k_must_be_at_least_two():
    with pytest.raises(InvalidPartitionError):
        validate_partition(1, ["B", "C1"], k=1)


def test_mapping_and_sequence_agree(rank_partition_h2):
    from_mapping = validate_partition(2, {"00": "B", "10": "C1", "01": "C2", "11": "A"})
    from_sequence = validate_partition(2, [LABEL_B, 1, 2, LABEL_A])
    assert from_mapping == from_sequence == rank_partition_h2


@given(measure_and_partition(max_n=5, max_k=5))
def test_product_measures_satisfy_the_strong_inequality(case):
    measure, partition = case
    assert check_strong_inequality(measure, partition).holds


@given(measure_and_partition(max_n=4, max_k=2))
def test_k2_identity(case):
    measure, partition = case
    difference, correlation = k2_identity_check(measure, partition)
    assert difference == correlation


@given(st.integers(0, 4), st.integers(2, 5), st.randoms(use_true_random=False))
def test_random_partitions_are_valid(n, k, rng):
    partition = random_partition(n, k, rng)
    assert validate_partition(n, partition.labels, k=k) == partition


def test_random_partitions_reach_every_valid_labeling_of_h2():
    # a labeling is fixed by its pair V_i = A ∪ C_i, so 36 upset pairs give 36 labelings
    expected = {
        labels
        for labels in product((LABEL_B, LABEL_A, 1, 2), repeat=4)
        if is_valid_labeling_brute(labels, 2, 2)
    }
    rng = random.Random(11)
    drawn = {random_partition(2, 2, rng, attempts=1).labels for _ in range(2000)}
    assert len(expected) == 36
    assert drawn == expected


def test_random_partitions_have_two_nonempty_c_blocks():
    rng = random.Random(5)
    draws = [random_partition(4, 3, rng) for _ in range(300)]
    nontrivial = sum(1 for p in draws if nonempty_c_blocks(p) >= 2)
    assert nontrivial >= 270
    uniform = uniform_measure(4)
    assert sum(1 for p in draws if check_strong_inequality(uniform, p).rhs > 0) == nontrivial


def test_single_draws_include_trivial_partitions():
    rng = random.Random(3)
    counts = [nonempty_c_blocks(random_partition(3, 2, rng, attempts=1)) for _ in range(300)]
    assert 0 < counts.count(2) < 300


def test_h1_has_no_partition_with_two_nonempty_c_blocks():
    assert all(nonempty_c_blocks(p) <= 1 for p in enumerate_partitions(1, 3))
    assert nonempty_c_blocks(random_partition(1, 3, random.Random(0))) <= 1


def test_enumerate_partitions_covers_every_valid_labeling():
    n, k = 2, 2
    expected = {
        labels
        for labels in product((LABEL_B, LABEL_A, 1, 2), repeat=4)
        if is_valid_labeling_brute(labels, n, k)
    }
    canonical = [p.labels for p in enumerate_partitions(n, k)]
    assert len(canonical) == len(set(canonical))
    swapped = {tuple({1: 2, 2: 1}.get(x, x) for x in labels) for labels in canonical}
    assert set(canonical) | swapped == expected


@given(product_measures(min_n=1, max_n=3))
def test_exhaustive_partitions_hold_for_product_measures(measure):
    for k in (2, 3):
        for partition in enumerate_partitions(measure.dimension, k):
            assert check_strong_inequality(measure, partition).holds


@given(measure_and_partition(max_n=4, max_k=4))
def test_induction_step_obligations_hold(case):
    measure, partition = case
    trace = induction_trace(measure, partition)
    total = trace.a0 + trace.b0 + trace.d + sum(trace.c_plus) + sum(trace.c_circ) + sum(trace.c_minus)
    assert total == 1
    verdict = verify_induction_step(trace)
    assert verdict.verdict == Verdict.HOLDS
    assert verdict.failed == []
    assert verdict.orientation in ("one-face", "zero-face", "symmetric")


def test_induction_orientation_is_the_upper_face():
    measure = product_measure(["1/3"])
    partition = partition_from_blocks(1, a=["1"], b=["0"], cs=[[], []])
    trace = induction_trace(measure, partition)
    assert trace.d == 1
    assert trace.q == Fraction(2, 3)
    assert verify_induction_step(trace).orientation == "one-face"


def test_symmetric_face_reports_symmetric():
    partition = partition_from_blocks(1, a=["1"], b=["0"], cs=[[], []])
    trace = induction_trace(uniform_measure(1), partition)
    assert verify_induction_step(trace).orientation == "symmetric"


def test_tampered_trace_fails_recomposition(rank_partition_h2):
    trace = induction_trace(product_measure(["1/3", "1/5"]), rank_partition_h2)
    tampered = trace.model_copy(update={"mass_a": trace.mass_a + Fraction(1, 7)})
    verdict = verify_induction_step(tampered)
    assert verdict.verdict == Verdict.VIOLATED
    assert "recomposition" in verdict.failed


def test_induction_trace_needs_a_product_measure(mu3, mu3_partition):
    with pytest.raises(NotProductMeasureError):
        induction_trace(mu3, mu3_partition)


def test_illegal_fiber():
    # A below B: never produced by a validated partition
    partition = Partition(1, (LABEL_A, LABEL_B), 2)
    with pytest.raises(IllegalFiberError):
        induction_trace(uniform_measure(1), partition)
