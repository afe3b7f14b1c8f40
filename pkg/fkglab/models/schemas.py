"""
Pydantic models for reports, verdicts and file documents
"""
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, model_validator

from fkglab.models.rationals import format_rational, parse_rational

Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]
BitString = Annotated[str, Field(pattern=r"^[01]*$")]


class Verdict(str, Enum):
    """Outcome of a check"""
    HOLDS = "holds"
    VIOLATED = "violated"
    INVALID_INPUT = "invalid-input"


class ExactModel(BaseModel):
    """Immutable model carrying exact rationals"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class FkgViolation(ExactModel):
    """A pair breaking μ(a∨b)μ(a∧b) ≥ μ(a)μ(b); points as bit strings"""
    a: BitString
    b: BitString
    lhs: Rational
    rhs: Rational

    @model_validator(mode="after")
    def _strict(self):
        if not self.lhs < self.rhs:
            raise ValueError("a violation needs lhs < rhs")
        return self


class AssociationViolation(ExactModel):
    """Two upsets with μ(E1 ∩ E2) < μ(E1)μ(E2); gap is the shortfall"""
    e1: List[BitString]
    e2: List[BitString]
    gap: Rational

    @model_validator(mode="after")
    def _positive_gap(self):
        if self.gap <= 0:
            raise ValueError("a violation needs a positive gap")
        return self


class InequalityReport(ExactModel):
    """Exact comparison lhs ≥ rhs; verdict holds iff margin ≥ 0"""
    lhs: Rational
    rhs: Rational
    margin: Rational
    verdict: Verdict

    @classmethod
    def compare(cls, lhs: Fraction, rhs: Fraction) -> "InequalityReport":
        margin = lhs - rhs
        return cls(
            lhs=lhs,
            rhs=rhs,
            margin=margin,
            verdict=Verdict.HOLDS if margin >= 0 else Verdict.VIOLATED,
        )

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.HOLDS


class InductionTrace(ExactModel):
    """Fiber masses of the last-coordinate induction step.

    q is the mass of the face with last coordinate 0; mass_a, mass_b and
    mass_c are the block masses observed on H_n.
    """
    a0: Rational
    b0: Rational
    d: Rational
    c_plus: Tuple[Rational, ...]
    c_circ: Tuple[Rational, ...]
    c_minus: Tuple[Rational, ...]
    q: Rational
    mass_a: Rational
    mass_b: Rational
    mass_c: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _consistent(self):
        k = len(self.c_plus)
        if k < 2 or len(self.c_circ) != k or len(self.c_minus) != k or len(self.mass_c) != k:
            raise ValueError("trace needs k >= 2 entries in every C family")
        entries = [self.a0, self.b0, self.d, *self.c_plus, *self.c_circ, *self.c_minus]
        if any(x < 0 for x in entries) or not 0 <= self.q <= 1:
            raise ValueError("trace entries must be nonnegative")
        if sum(entries) != 1:
            raise ValueError("trace entries must sum to 1")
        return self

    @property
    def k(self) -> int:
        return len(self.c_plus)


class InductionVerdict(ExactModel):
    verdict: Verdict
    failed: List[str] = Field(default_factory=list)
    orientation: Optional[str] = None


class TriplePartitionProbs(ExactModel):
    """Connectivity-class probabilities of three marked vertices"""
    p123: Rational
    p12_3: Rational
    p13_2: Rational
    p1_23: Rational
    p1_2_3: Rational

    @model_validator(mode="after")
    def _probability_vector(self):
        values = self.as_tuple()
        if any(x < 0 for x in values) or sum(values) != 1:
            raise ValueError("triple partition probabilities must be nonnegative and sum to 1")
        return self

    def as_tuple(self) -> Tuple[Fraction, ...]:
        return (self.p123, self.p12_3, self.p13_2, self.p1_23, self.p1_2_3)

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(zip(TRIPLE_CLASS_NAMES, self.as_tuple()))


TRIPLE_CLASS_NAMES = ("123", "12|3", "13|2", "1|23", "1|2|3")


class MonteCarloEstimate(ExactModel):
    """Empirical frequencies with Hoeffding half-widths"""
    samples: int
    seed: int
    workers: int
    counts: Dict[str, int]
    frequencies: Dict[str, Rational]
    half_width: float
    confidence: float

    def covers(self, exact: Dict[str, Fraction]) -> bool:
        """True iff every exact value lies within the half-width of its estimate"""
        return all(
            abs(float(self.frequencies[key] - value)) <= self.half_width
            for key, value in exact.items()
        )


class DegreeSetDistribution(ExactModel):
    """probs[k] = P(|S| = k) for the uniform random graph on 2n vertices"""
    n: int
    probs: Tuple[Rational, ...]

    @model_validator(mode="after")
    def _probability_vector(self):
        if len(self.probs) != 2 * self.n + 1:
            raise ValueError("distribution needs 2n + 1 entries")
        if any(x < 0 for x in self.probs) or sum(self.probs) != 1:
            raise ValueError("distribution must be nonnegative and sum to 1")
        return self

    def below(self, k: int) -> Fraction:
        return sum(self.probs[:k], Fraction(0))

    def above(self, k: int) -> Fraction:
        return sum(self.probs[k + 1:], Fraction(0))


class CentralBoundReport(ExactModel):
    """Squared k = n bound; the decimal fields are display-only"""
    lhs: Rational
    rhs: Rational
    margin: Rational
    verdict: Verdict
    cap_display: str
    limit_display: str


class MonotonicityWitness(ExactModel):
    """Output `output` drops from 1 to 0 when `bit` is set in `assignment`"""
    output: int
    assignment: int
    bit: int


class RealizationVerdict(ExactModel):
    verdict: Verdict
    monotonicity_witness: Optional[MonotonicityWitness] = None
    pushforward_matches: bool = False
    mismatched_points: List[str] = Field(default_factory=list)


class RunReport(BaseModel):
    """Result of one CLI command; exit code 0 holds, 1 violated, 2 invalid input"""
    command: str
    verdict: Verdict
    witnesses: Dict[str, Any] = Field(default_factory=dict)
    exit_code: int

    @model_validator(mode="after")
    def _exit_code_contract(self):
        expected = EXIT_CODES[self.verdict]
        if self.exit_code != expected:
            raise ValueError(f"exit code {self.exit_code} does not match verdict {self.verdict.value}")
        return self

    @classmethod
    def build(cls, command: str, verdict: Verdict, **witnesses: Any) -> "RunReport":
        return cls(command=command, verdict=verdict, witnesses=witnesses, exit_code=EXIT_CODES[verdict])


EXIT_CODES = {Verdict.HOLDS: 0, Verdict.VIOLATED: 1, Verdict.INVALID_INPUT: 2}


# ==================== FILE DOCUMENTS ====================

class MeasureDocument(BaseModel):
    """{"n": 3, "weights": {"000": "1/3", ...}}; omitted points weigh 0"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int = Field(ge=0)
    weights: Dict[str, Rational]


class PartitionDocument(BaseModel):
    """{"n": 3, "k": 3, "A": [...], "B": [...], "C": [[...], ...]}"""
    n: int = Field(ge=0)
    k: int = Field(ge=2)
    A: List[str] = Field(default_factory=list)
    B: List[str] = Field(default_factory=list)
    C: List[List[str]]

    @model_validator(mode="after")
    def _block_count(self):
        if len(self.C) != self.k:
            raise ValueError(f"expected {self.k} C blocks, got {len(self.C)}")
        return self


class RealizationOutputDocument(BaseModel):
    table: str = Field(pattern=r"^[01]+$")


class RealizationDocument(BaseModel):
    """Sources as "p/q" strings; table character s is the output on assignment s"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: int = Field(ge=0)
    sources: List[Rational]
    outputs: List[RealizationOutputDocument]
    names: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.sources) != self.m:
            raise ValueError(f"expected {self.m} sources, got {len(self.sources)}")
        for output in self.outputs:
            if len(output.table) != 1 << self.m:
                raise ValueError(f"truth tables need 2^m = {1 << self.m} entries")
        return self


# ==================== PROPERTY SUITE ====================

class SuiteStepResult(BaseModel):
    """Outcome of one property-suite step; `witness` describes the first failing trial.

    Steps drawing random partitions also count the trials whose partition
    has two or more nonempty C blocks (`nontrivial`) against the required
    `min_nontrivial`.
    """
    name: str
    trials: int
    failures: int
    witness: Optional[str] = None
    details: List[str] = Field(default_factory=list)
    nontrivial: Optional[int] = None
    min_nontrivial: int = 0

    @property
    def coverage_met(self) -> bool:
        return self.nontrivial is None or self.nontrivial >= self.min_nontrivial

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.coverage_met


class SuiteReport(BaseModel):
    seed: int
    trials: int
    steps: List[SuiteStepResult]
    verdict: Verdict
