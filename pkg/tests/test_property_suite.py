from fractions import Fraction

from fkglab.models.schemas import Verdict
from fkglab.services.measures import check_fkg_property
from fkglab.services.strong_inequality import check_strong_inequality
from fkglab.workflows.property_suite import PropertySuite, fixed_point_counterexample


def test_step_counts_scale_from_trials():
    suite = PropertySuite(seed=42, trials=1000)
    counts = {name: (count, tolerated) for name, _, count, tolerated in suite.steps}
    assert counts == {
        "fixed-point-counterexample": (1, 0),
        "strong-random-product": (1000, 0),
        "strong-exhaustive-product": (100, 0),
        "strong-fui-pushforward": (200, 0),
        "realization-round-trip": (50, 0),
        "induction-step": (500, 0),
        "percolation": (1000, 0),
        "percolation-cross-check": (100, 0),
        "monte-carlo-coverage": (100, 1),
        "degree-sets": (3, 0),
    }


def test_small_trial_counts_run_every_step_once():
    suite = PropertySuite(seed=1, trials=1)
    assert all(count >= 1 for _, _, count, _ in suite.steps)


def test_fixed_point_counterexample():
    measure, partition = fixed_point_counterexample()
    report = check_strong_inequality(measure, partition)
    assert (report.lhs, report.rhs) == (Fraction(1, 18), Fraction(1, 12))
    assert check_fkg_property(measure) is not None


def test_small_run_holds():
    report = PropertySuite(seed=42, trials=10).run()
    assert report.verdict == Verdict.HOLDS
    assert [step.name for step in report.steps][0] == "fixed-point-counterexample"
    assert all(step.passed for step in report.steps)
    assert all(step.witness is None for step in report.steps)


def test_runs_are_reproducible():
    first = PropertySuite(seed=5, trials=5, verbose=True).run()
    second = PropertySuite(seed=5, trials=5, verbose=True).run()
    assert first == second
    assert len(first.steps[1].details) == first.steps[1].trials


def test_random_partition_steps_meet_the_nontrivial_share():
    suite = PropertySuite(seed=42, trials=100)
    for name, trial, count in (
        ("strong-random-product", suite._strong_random_product_trial, 100),
        ("induction-step", suite._induction_trial, 60),
    ):
        result = suite._run_step(name, trial, count, 0)
        assert result.failures == 0
        assert result.min_nontrivial == int(0.25 * count)
        assert result.nontrivial >= result.min_nontrivial
        assert result.passed


def test_steps_without_random_partitions_report_no_share():
    suite = PropertySuite(seed=42, trials=10)
    result = suite._run_step("percolation", suite._percolation_trial, 5, 0)
    assert result.nontrivial is None
    assert result.coverage_met


def test_missing_nontrivial_share_fails_the_step(monkeypatch):
    from fkglab.config import settings

    monkeypatch.setattr(settings, "suite_min_nontrivial_share", 1.0)
    suite = PropertySuite(seed=42, trials=100)
    # H_1 draws never have two nonempty C blocks, and n = 1 comes up in about a fifth of the trials
    result = suite._run_step("strong-random-product", suite._strong_random_product_trial, 100, 0)
    assert result.failures == 0
    assert result.nontrivial < result.min_nontrivial == 100
    assert not result.passed
