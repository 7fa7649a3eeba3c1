"""Query evaluation and statistical-query oracle sessions.

An oracle answers a query h with any value within the tolerance tau of
h(D, f) = E_{x ~ D}[h(x, f(x))]. Two answering policies are provided:

* HonestPolicy answers for one instance or point set, with zero noise or a bounded
  adversarial perturbation.
* AdversarialPairing holds both instances D_{a,0} and D_{a,1} and answers the
  b = 0 value whenever the two values are within tau, so the transcript only
  depends on b through queries that separate the pair.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from sqsep import utils
from sqsep.cube import HardInstance, InstancePair, LabeledCloud
from sqsep.cube.distances import MAX_CUBE_BITS
from sqsep.errors import (
    AdaptivityViolation,
    EnumerationBudgetExceeded,
    ParameterError,
    QueryBudgetExceeded,
)
from sqsep.sq.queries import StatQuery


_logger = logging.getLogger("sqsep.console")

MODES = ("exact", "mc", "auto")


@dataclass(frozen=True)
class SqEstimate:
    """Value of a query with its 99% confidence half-width (0 when exact)."""

    value: float
    half_width: float = 0.0
    mode: str = "exact"
    samples: int = 0


def hoeffding_half_width(n: int, confidence: float = 0.99) -> float:
    """Half-width of the Hoeffding interval for n values in [-1, 1]."""
    if n <= 0:
        return math.inf
    return math.sqrt(2.0 * math.log(2.0 / (1.0 - confidence)) / n)


def analytic_value(h: StatQuery, inst: HardInstance) -> float:
    """Exact h(D_{a,b}, f_{a,b}) for a query carrying a label-parity expansion.

    A term c * chi_S(x) * y^e contributes c * chi_S(a) * E[y^(|S|+e)] times the
    Fourier coefficients of the two halves at |S n first| and |S n second|,
    since x = a * y * u with u independent of y.
    """
    if h.expansion is None:
        raise ValueError(f"Query {h.descriptor} has no Fourier expansion")
    first, second = (inst.p1, inst.pm1) if inst.b == 0 else (inst.pm1, inst.p1)
    d = inst.d
    total = 0.0
    for subset, power, coeff in h.expansion:
        if (len(subset) + power) % 2:
            continue
        subset = np.asarray(subset, dtype=int)
        if subset.size and (subset.min() < 0 or subset.max() >= 2 * d):
            raise ValueError(f"Subset of {h.descriptor} leaves [0, {2 * d})")
        low = int(np.count_nonzero(subset < d))
        chi_a = float(np.prod(inst.a[subset])) if subset.size else 1.0
        total += (
            coeff
            * chi_a
            * first.fourier_by_cardinality[low]
            * second.fourier_by_cardinality[subset.size - low]
        )
    return float(total)


class InstanceEvaluator:
    """Evaluates queries on one instance, caching its exact support or sample.

    In exact mode the full support of D_{a,b} is enumerated once. In
    Monte-Carlo mode one sample of size ``samples`` is drawn up front and
    serves as the instance for every later query, so all answers refer to
    the same empirical distribution. Queries with an expansion are always
    evaluated analytically.
    """

    def __init__(
        self,
        inst: HardInstance,
        mode: str = "auto",
        samples: int = 4000,
        rng: Optional[np.random.Generator] = None,
        max_bits: int = MAX_CUBE_BITS,
        cloud: Optional[LabeledCloud] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"Unknown evaluation mode '{mode}', expected one of {MODES}")
        if mode == "auto":
            mode = "exact" if inst.dimension <= max_bits else "mc"
        self.inst = inst
        self.mode = mode
        self.samples = samples
        self.max_bits = max_bits
        self._rng = rng
        self._cloud = cloud

    @property
    def cloud(self) -> LabeledCloud:
        if self._cloud is None:
            if self.mode == "exact":
                self._cloud = self.inst.exact_cloud(self.max_bits)
            else:
                rng = self._rng if self._rng is not None else np.random.default_rng()
                self._cloud = self.inst.sample(rng, self.samples)
        return self._cloud

    def value(self, h: StatQuery) -> SqEstimate:
        if h.expansion is not None:
            return SqEstimate(analytic_value(h, self.inst))
        if self.mode == "exact":
            return SqEstimate(self.cloud.expect(h))
        cloud = self.cloud
        return SqEstimate(
            cloud.expect(h), hoeffding_half_width(len(cloud)), "mc", len(cloud)
        )


class CloudEvaluator:
    """Evaluates queries exactly on a fixed, possibly weighted, labeled point set."""

    inst = None
    mode = "exact"

    def __init__(self, cloud: LabeledCloud):
        self.cloud = cloud

    def value(self, h: StatQuery) -> SqEstimate:
        return SqEstimate(self.cloud.expect(h), samples=len(self.cloud))


def sq_value(
    h: StatQuery,
    inst: HardInstance,
    mode: str = "exact",
    samples: int = 4000,
    rng: Optional[np.random.Generator] = None,
    max_bits: int = MAX_CUBE_BITS,
) -> SqEstimate:
    """h(D_{a,b}, f_{a,b}), exactly or by Monte-Carlo with a 99% Hoeffding interval.

    Args:
        h: Statistical query
        inst: Hard instance
        mode: "exact", "mc" or "auto" (exact when enumerable)
        samples: Monte-Carlo sample size
        rng: Random generator for Monte-Carlo mode
        max_bits: Enumeration budget in bits of the joint cube

    Raises:
        EnumerationBudgetExceeded: In exact mode when the query has no
            expansion and 2d exceeds ``max_bits``
    """
    if mode == "exact" and h.expansion is None and inst.dimension > max_bits:
        raise EnumerationBudgetExceeded(
            f"Exact evaluation of {h.descriptor} needs 2^{inst.dimension} points"
        )
    return InstanceEvaluator(inst, mode, samples, rng, max_bits).value(h)


@dataclass(frozen=True)
class PolicyAnswer:
    answer: float
    true_values: Dict[str, float]
    branch: str


class BasePolicy(ABC):
    """Answering strategy of an oracle session."""

    @abstractmethod
    def answer(self, h: StatQuery, tau: float) -> PolicyAnswer:
        """Answer one query within tolerance tau."""

    def answer_batch(self, queries: Sequence[StatQuery], tau: float) -> List[PolicyAnswer]:
        """Answer a declared query set; the default answers one by one."""
        return [self.answer(h, tau) for h in queries]


class HonestPolicy(BasePolicy):
    """Answers within tau of the true value of one instance.

    Noise kinds:
        zero: the exact value
        worst_case: the value pushed by tau toward the query's neutral value
        uniform: the value plus uniform noise on [-tau, tau]
    """

    NOISE = ("zero", "worst_case", "uniform")

    def __init__(
        self,
        evaluator: Union[InstanceEvaluator, CloudEvaluator],
        noise: str = "zero",
        rng: Optional[np.random.Generator] = None,
    ):
        if noise not in self.NOISE:
            raise ValueError(f"Unknown noise kind '{noise}', expected one of {self.NOISE}")
        self.evaluator = evaluator
        self.noise = noise
        self._rng = rng if rng is not None else np.random.default_rng()

    @property
    def truth_key(self) -> str:
        inst = self.evaluator.inst
        return "truth" if inst is None else f"b{inst.b}"

    def answer(self, h: StatQuery, tau: float) -> PolicyAnswer:
        truth = self.evaluator.value(h).value
        if self.noise == "worst_case":
            answer = truth + float(np.clip(h.neutral - truth, -tau, tau))
        elif self.noise == "uniform":
            answer = truth + float(self._rng.uniform(-tau, tau))
        else:
            answer = truth
        return PolicyAnswer(answer, {self.truth_key: truth}, "honest")


class AdversarialPairing(BasePolicy):
    """The pairing oracle for a translation vector a and a true bit b.

    The answer is the b = 0 value unless b = 1 and the two values differ by
    more than tau, in which case the b = 1 value is returned. The branch is
    "paired" when the values are within tau and "separated" otherwise, for
    either b.
    """

    def __init__(self, evaluators: Tuple[InstanceEvaluator, InstanceEvaluator], b: int):
        if b not in (0, 1):
            raise ParameterError(f"b must be 0 or 1, got {b}")
        first, second = evaluators
        if first.inst.b != 0 or second.inst.b != 1:
            raise ParameterError("Evaluators must be ordered as (b=0, b=1)")
        if not np.array_equal(first.inst.a, second.inst.a):
            raise ParameterError("Paired instances must share the translation a")
        self.evaluators = evaluators
        self.b = b

    @classmethod
    def for_pair(
        cls,
        pair: InstancePair,
        b: int,
        mode: str = "auto",
        samples: int = 4000,
        rng: Optional[np.random.Generator] = None,
    ) -> "AdversarialPairing":
        """Build evaluators for both instances of a pair.

        In Monte-Carlo mode the two clouds are coupled through the same hidden
        draws.
        """
        if mode == "auto":
            mode = "exact" if pair.instance(0).dimension <= MAX_CUBE_BITS else "mc"
        clouds: Tuple[Optional[LabeledCloud], Optional[LabeledCloud]] = (None, None)
        if mode == "mc":
            rng = rng if rng is not None else np.random.default_rng()
            clouds = pair.sample_clouds(rng, samples)
        evaluators = tuple(
            InstanceEvaluator(pair.instance(i), mode, samples, cloud=clouds[i])
            for i in (0, 1)
        )
        return cls(evaluators, b)

    def answer(self, h: StatQuery, tau: float) -> PolicyAnswer:
        v0 = self.evaluators[0].value(h).value
        v1 = self.evaluators[1].value(h).value
        branch = "paired" if abs(v0 - v1) <= tau else "separated"
        answer = v1 if self.b == 1 and branch == "separated" else v0
        return PolicyAnswer(answer, {"b0": v0, "b1": v1}, branch)


@dataclass(frozen=True)
class QueryRecord:
    index: int
    descriptor: str
    answer: float
    true_values: Dict[str, float]
    branch: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "query_descriptor": self.descriptor,
            "answer": self.answer,
            "true_values": self.true_values,
            "branch": self.branch,
        }


@dataclass
class SqOracleSession:
    """A single-owner oracle session with an append-only query log.

    Adaptive sessions answer each query as it arrives through ``query``.
    Non-adaptive sessions take every query through ``submit``. The first call
    to ``answers`` answers them all at once and later calls return the same
    list; any submission after the first read raises AdaptivityViolation.

    Attributes:
        tolerance: The tolerance tau
        policy: Answering policy
        budget: Maximum number of queries, None for unlimited
        adaptive: Whether queries may depend on earlier answers
    """

    tolerance: float
    policy: BasePolicy
    budget: Optional[int] = None
    adaptive: bool = True
    _log: List[QueryRecord] = field(default_factory=list, init=False, repr=False)
    _pending: List[StatQuery] = field(default_factory=list, init=False, repr=False)
    _released: bool = field(default=False, init=False, repr=False)
    _answers: List[float] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if self.tolerance < 0:
            raise ParameterError(f"Tolerance must be nonnegative, got {self.tolerance}")

    @property
    def log(self) -> Tuple[QueryRecord, ...]:
        return tuple(self._log)

    @property
    def released(self) -> bool:
        """Whether the answers of a non-adaptive session have been read."""
        return self._released

    @property
    def queries_used(self) -> int:
        return len(self._log) + len(self._pending)

    def _charge(self, count: int):
        if self.budget is not None and self.queries_used + count > self.budget:
            raise QueryBudgetExceeded(
                f"Session budget of {self.budget} queries exhausted"
                f" ({self.queries_used} used, {count} requested)"
            )

    def _record(self, h: StatQuery, result: PolicyAnswer) -> float:
        self._log.append(
            QueryRecord(
                len(self._log), h.descriptor, result.answer, result.true_values, result.branch
            )
        )
        return result.answer

    def query(self, h: StatQuery) -> float:
        """Answer one query immediately.

        Raises:
            AdaptivityViolation: In a non-adaptive session
            QueryBudgetExceeded: When the budget is spent
        """
        if not self.adaptive:
            raise AdaptivityViolation("Non-adaptive sessions take queries through submit()")
        self._charge(1)
        return self._record(h, self.policy.answer(h, self.tolerance))

    def submit(self, queries: Union[StatQuery, Sequence[StatQuery]]) -> List[int]:
        """Declare queries of a non-adaptive session; returns their indices."""
        if self._released:
            raise AdaptivityViolation("Query submitted after answers were read")
        if isinstance(queries, StatQuery):
            queries = [queries]
        self._charge(len(queries))
        start = self.queries_used
        self._pending.extend(queries)
        return list(range(start, start + len(queries)))

    def answers(self) -> List[float]:
        """Answer every submitted query; later calls return a copy of the same answers."""
        if not self._released:
            self._released = True
            pending, self._pending = self._pending, []
            results = self.policy.answer_batch(pending, self.tolerance)
            self._answers = [self._record(h, result) for h, result in zip(pending, results)]
        return list(self._answers)

    def run(self, queries: Iterable[StatQuery]) -> List[float]:
        """Submit a query set and read its answers in one step."""
        if self.adaptive:
            return [self.query(h) for h in queries]
        self.submit(list(queries))
        return self.answers()

    def transcript(self) -> List[Dict[str, Any]]:
        return [record.to_dict() for record in self._log]

    def answer_vector(self) -> np.ndarray:
        return np.array([record.answer for record in self._log])

    def branches(self) -> List[str]:
        return [record.branch for record in self._log]

    def write_transcript(self, file: str, header: Optional[Dict[str, Any]] = None):
        utils.write_jsonl(file, self.transcript(), header=header)


def adversarial_answer(session: SqOracleSession, h: StatQuery) -> float:
    """Answer h through a session holding an AdversarialPairing policy.

    Raises:
        ParameterError: If the session policy is not AdversarialPairing
        QueryBudgetExceeded: When the session budget is spent
        AdaptivityViolation: If a read non-adaptive session never declared h
    """
    if not isinstance(session.policy, AdversarialPairing):
        raise ParameterError("adversarial_answer needs an AdversarialPairing session")
    if session.adaptive:
        return session.query(h)
    if session.released:
        # the answer set is closed: only queries already declared can be read
        for record in reversed(session.log):
            if record.descriptor == h.descriptor:
                return record.answer
        raise AdaptivityViolation(f"Query {h.descriptor} was not declared before the answers")
    session.submit(h)
    return session.answers()[-1]

