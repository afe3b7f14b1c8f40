"""
Seeded property-test battery over every checker in the toolkit.

Each step draws its trials from random.Random(f"{seed}:{step}:{trial}"),
so a step's outcome does not depend on which other steps ran and the
whole report is reproducible for a fixed seed and worker count.
"""
import logging
import math
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from fkglab.config import settings
from fkglab.models.schemas import SuiteReport, SuiteStepResult, Verdict
from fkglab.services import degree_sets, percolation
from fkglab.services.measures import (
    Measure,
    check_fkg_property,
    check_positive_association,
    fixed_point_measure,
    ising_measure,
    product_measure,
)
from fkglab.services.realization import (
    pushforward,
    random_monotone_realization,
    random_source_probability,
    realize,
    verify_realization,
)
from fkglab.services.strong_inequality import (
    Partition,
    check_strong_inequality,
    enumerate_partitions,
    induction_trace,
    nonempty_c_blocks,
    partition_from_blocks,
    random_partition,
    verify_induction_step,
)

logger = logging.getLogger(__name__)

MC_SAMPLES = 100_000

# steps shorter than this skip the nontrivial-partition share check
MIN_COVERAGE_TRIALS = 50

# A trial returns (passed, one-line description)
TrialResult = Tuple[bool, str]
Trial = Callable[[random.Random, int], TrialResult]


def random_product_measure(n: int, rng: random.Random) -> Measure:
    return product_measure([random_source_probability(rng) for _ in range(n)])


def random_ising_measure(n: int, rng: random.Random) -> Measure:
    """Ising-type measure with couplings B_ij ≥ 1 and positive fields"""
    couplings = [[Fraction(1)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            couplings[i][j] = couplings[j][i] = 1 + Fraction(rng.randint(0, 4), rng.randint(1, 4))
    fields = [Fraction(rng.randint(1, 6), rng.randint(1, 6)) for _ in range(n)]
    return ising_measure(couplings, fields)


def fixed_point_counterexample() -> Tuple[Measure, Partition]:
    """μ_3 with A = {|S| ≥ 2}, C_i = {{i}}, B = {∅}"""
    partition = partition_from_blocks(
        3,
        a=["110", "101", "011", "111"],
        b=["000"],
        cs=[["100"], ["010"], ["001"]],
    )
    return fixed_point_measure(3), partition


class PropertySuite:
    """Runs the step list below; trial counts scale from `trials`"""

    def __init__(self, seed: int, trials: int, workers: Optional[int] = None, verbose: bool = False):
        self.seed = seed
        self.trials = trials
        self.workers = workers
        self.verbose = verbose
        self._partition_cache: Dict[Tuple[int, int], List[Partition]] = {}
        self._exact_references: Dict[str, Dict[str, Fraction]] = {}
        self._partition_draws = 0
        self._nontrivial_draws = 0

        # (step name, trial function, trial count, tolerated failures)
        self.steps: List[Tuple[str, Trial, int, int]] = [
            ("fixed-point-counterexample", self._fixed_point_trial, 1, 0),
            ("strong-random-product", self._strong_random_product_trial, max(1, trials), 0),
            ("strong-exhaustive-product", self._strong_exhaustive_trial, max(1, trials // 10), 0),
            ("strong-fui-pushforward", self._fui_trial, max(1, trials // 5), 0),
            ("realization-round-trip", self._realization_trial, max(1, trials // 20), 0),
            ("induction-step", self._induction_trial, max(1, trials // 2), 0),
            ("percolation", self._percolation_trial, max(1, trials), 0),
            ("percolation-cross-check", self._percolation_cross_trial, max(1, trials // 10), 0),
            ("monte-carlo-coverage", self._monte_carlo_trial, max(1, trials // 10), trials // 1000),
            ("degree-sets", self._degree_trial, 3, 0),
        ]
        logger.debug(f"[SUITE] PropertySuite initialized with {len(self.steps)} steps")

    def run(self) -> SuiteReport:
        results = [self._run_step(name, trial, count, tolerated) for name, trial, count, tolerated in self.steps]
        passed = all(
            result.failures <= tolerated and result.coverage_met
            for result, (_, _, _, tolerated) in zip(results, self.steps)
        )
        verdict = Verdict.HOLDS if passed else Verdict.VIOLATED
        logger.info(f"[SUITE] Finished seed={self.seed} trials={self.trials}: {verdict.value}")
        return SuiteReport(seed=self.seed, trials=self.trials, steps=results, verdict=verdict)

    def _run_step(self, name: str, trial: Trial, count: int, tolerated: int) -> SuiteStepResult:
        logger.info(f"[SUITE] Step {name}: {count} trials")
        failures = 0
        witness = None
        details = []
        self._partition_draws = self._nontrivial_draws = 0
        for index in range(count):
            rng = random.Random(f"{self.seed}:{name}:{index}")
            passed, description = trial(rng, index)
            if not passed:
                failures += 1
                if witness is None:
                    witness = f"trial {index}: {description}"
                logger.warning(f"[SUITE] {name} trial {index} failed: {description}")
            if self.verbose:
                details.append(f"{index} {'ok' if passed else 'FAIL'} {description}")
        if failures > tolerated:
            logger.error(f"[SUITE] Step {name} failed {failures}/{count} trials")
        result = SuiteStepResult(name=name, trials=count, failures=failures, witness=witness, details=details)
        if self._partition_draws:
            required = int(settings.suite_min_nontrivial_share * count) if count >= MIN_COVERAGE_TRIALS else 0
            result = result.model_copy(update={"nontrivial": self._nontrivial_draws, "min_nontrivial": required})
            if not result.coverage_met:
                logger.error(
                    f"[SUITE] Step {name} drew only {self._nontrivial_draws}/{count} partitions "
                    f"with two nonempty C blocks, {required} required"
                )
        return result

    def _draw_partition(self, n: int, k: int, rng: random.Random) -> Partition:
        partition = random_partition(n, k, rng)
        self._partition_draws += 1
        if nonempty_c_blocks(partition) >= 2:
            self._nontrivial_draws += 1
        return partition

    def _partitions(self, n: int, k: int) -> List[Partition]:
        key = (n, k)
        if key not in self._partition_cache:
            self._partition_cache[key] = list(enumerate_partitions(n, k))
        return self._partition_cache[key]

    def _all_partitions_hold(self, measure: Measure, ks: Tuple[int, ...] = (2, 3)) -> TrialResult:
        checked = 0
        for k in ks:
            for partition in self._partitions(measure.dimension, k):
                report = check_strong_inequality(measure, partition)
                checked += 1
                if not report.holds:
                    return False, f"n={measure.dimension} k={k} labels={partition.labels} {report.lhs} < {report.rhs}"
        return True, f"n={measure.dimension} partitions={checked}"

    # ==================== STEPS ====================

    def _fixed_point_trial(self, rng: random.Random, index: int) -> TrialResult:
        measure, partition = fixed_point_counterexample()
        report = check_strong_inequality(measure, partition)
        fkg = check_fkg_property(measure)
        association = check_positive_association(measure)
        passed = (
            report.lhs == Fraction(1, 18)
            and report.rhs == Fraction(1, 12)
            and not report.holds
            and fkg is not None
            and association is None
        )
        return passed, f"lhs={report.lhs} rhs={report.rhs} fkg-fails={fkg is not None} pa-holds={association is None}"

    def _strong_random_product_trial(self, rng: random.Random, index: int) -> TrialResult:
        n = rng.randint(1, 5)
        k = rng.randint(2, 5)
        measure = random_product_measure(n, rng)
        partition = self._draw_partition(n, k, rng)
        report = check_strong_inequality(measure, partition)
        return report.holds, f"n={n} k={k} lhs={report.lhs} rhs={report.rhs}"

    def _strong_exhaustive_trial(self, rng: random.Random, index: int) -> TrialResult:
        n = rng.randint(1, 3)
        return self._all_partitions_hold(random_product_measure(n, rng))

    def _fui_trial(self, rng: random.Random, index: int) -> TrialResult:
        m = rng.randint(1, 4)
        n = rng.randint(1, 3)
        realization = random_monotone_realization(m, n, rng)
        passed, description = self._all_partitions_hold(pushforward(realization, self.workers))
        return passed, f"m={m} {description}"

    def _realization_trial(self, rng: random.Random, index: int) -> TrialResult:
        n = rng.randint(1, 3)
        measure = random_ising_measure(n, rng)
        realization = realize(measure)
        verdict = verify_realization(realization, measure, self.workers)
        return verdict.verdict == Verdict.HOLDS, f"n={n} m={realization.m} {verdict.verdict.value}"

    def _induction_trial(self, rng: random.Random, index: int) -> TrialResult:
        n = rng.randint(1, 4)
        k = rng.randint(2, 4)
        measure = random_product_measure(n, rng)
        trace = induction_trace(measure, self._draw_partition(n, k, rng))
        verdict = verify_induction_step(trace)
        return verdict.verdict == Verdict.HOLDS, f"n={n} k={k} orientation={verdict.orientation} failed={verdict.failed}"

    def _percolation_trial(self, rng: random.Random, index: int) -> TrialResult:
        graph, terminals = percolation.random_graph(rng)
        probs = percolation.exact_triple_probs(graph, terminals, self.workers)
        report = percolation.check_percolation_inequality(probs)
        return report.holds, f"edges={graph.edge_count} lhs={report.lhs} rhs={report.rhs}"

    def _percolation_cross_trial(self, rng: random.Random, index: int) -> TrialResult:
        graph, terminals = percolation.random_graph(rng)
        measure, partition = percolation.percolation_to_partition(graph, terminals)
        strong = check_strong_inequality(measure, partition)
        direct = percolation.check_percolation_inequality(
            percolation.exact_triple_probs(graph, terminals, self.workers)
        )
        passed = strong.lhs == direct.lhs and strong.rhs == direct.rhs
        return passed, f"edges={graph.edge_count} strong=({strong.lhs}, {strong.rhs}) direct=({direct.lhs}, {direct.rhs})"

    def _exact_reference(self, name: str) -> Dict[str, Fraction]:
        if name not in self._exact_references:
            if name == "triangle":
                probs = percolation.exact_triple_probs(percolation.triangle_graph(), (0, 1, 2), self.workers)
                self._exact_references[name] = probs.as_dict()
            else:
                dist = degree_sets.exact_degree_distribution(2, workers=self.workers)
                self._exact_references[name] = {str(k): p for k, p in enumerate(dist.probs)}
        return self._exact_references[name]

    def _monte_carlo_trial(self, rng: random.Random, index: int) -> TrialResult:
        triangle = percolation.mc_triple_probs(
            percolation.triangle_graph(), (0, 1, 2), MC_SAMPLES, rng.getrandbits(63), self.workers
        )
        degrees = degree_sets.mc_degree_distribution(2, MC_SAMPLES, rng.getrandbits(63), self.workers)
        triangle_ok = triangle.covers(self._exact_reference("triangle"))
        degrees_ok = degrees.covers(self._exact_reference("degree-2"))
        return triangle_ok and degrees_ok, (
            f"triangle seed={triangle.seed} covered={triangle_ok} degree seed={degrees.seed} covered={degrees_ok}"
        )

    def _degree_trial(self, rng: random.Random, index: int) -> TrialResult:
        n = index + 1
        dist = degree_sets.exact_degree_distribution(n, workers=self.workers)
        failed = [k for k in range(2 * n + 1) if not degree_sets.check_degree_corollary(dist, k).holds]
        central = degree_sets.check_central_bound(dist)
        prefactors = [
            k for k in range(2 * n + 1)
            if not degree_sets.prefactor_comparison(math.comb(2 * n, k)).holds
        ]
        symmetric = degree_sets.is_complement_symmetric(dist)
        passed = not failed and central.verdict == Verdict.HOLDS and not prefactors and symmetric
        return passed, (
            f"n={n} corollary-failures={failed} central={central.verdict.value} "
            f"prefactor-failures={prefactors} symmetric={symmetric}"
        )
