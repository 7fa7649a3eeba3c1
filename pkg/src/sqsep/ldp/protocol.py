"""The non-interactive local protocol.

Every user holds one labeled sample. All randomizer assignments are fixed
before any message is produced, each sample is read exactly once, and each
user's epsilons add up to at most the protocol budget.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging
import math

import numpy as np

from sqsep import utils
from sqsep.cube import HardInstance, LabeledCloud
from sqsep.errors import AdaptivityViolation, BudgetExceeded, ParameterError, SampleReuse
from sqsep.ldp.randomizers import LocalRandomizer, rr_randomizer
from sqsep.sq.oracle import BasePolicy, PolicyAnswer
from sqsep.sq.queries import StatQuery


_logger = logging.getLogger("sqsep.console")

RandomizerFactory = Callable[[StatQuery, float], LocalRandomizer]


def _plain(message):
    if isinstance(message, tuple):
        return [_plain(part) for part in message]
    return message.item() if isinstance(message, np.generic) else message


class UserPool:
    """Users 0..n-1, each holding one sample that can be read once."""

    def __init__(self, cloud: LabeledCloud):
        self._cloud = cloud
        self._read = np.zeros(len(cloud), dtype=bool)

    def __len__(self) -> int:
        return len(self._cloud)

    @property
    def accessed(self) -> int:
        return int(self._read.sum())

    def take(self, users: Sequence[int]):
        """Hand out the samples of ``users`` and mark them read.

        Raises:
            SampleReuse: If a user's sample was already read
        """
        users = np.asarray(users, dtype=int)
        if len(np.unique(users)) != len(users):
            raise SampleReuse("A user appears twice in one access")
        if np.any(self._read[users]):
            reused = users[self._read[users]][:5].tolist()
            raise SampleReuse(f"Samples of users {reused} were already accessed")
        self._read[users] = True
        return self._cloud.X[users], self._cloud.y[users]


@dataclass(frozen=True)
class QueryEstimate:
    descriptor: str
    estimate: float
    std_error: float
    users: int


@dataclass
class ProtocolRun:
    """Assignments, transcript and per-query estimates of one run."""

    epsilon: float
    descriptors: List[str]
    assignments: List[List[int]]
    messages: List[Dict[str, Any]] = field(default_factory=list)
    estimates: List[QueryEstimate] = field(default_factory=list)
    seed: Optional[int] = None

    def estimate_vector(self) -> np.ndarray:
        return np.array([item.estimate for item in self.estimates])

    def header(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "queries": self.descriptors,
            "seed": self.seed,
            "users": len(self.assignments),
        }

    def write_transcript(self, file: str):
        utils.write_jsonl(file, self.messages, header=self.header())


class NonInteractiveProtocol:
    """Runs a fixed query set through local randomizers in one round.

    Args:
        queries: The statistical queries, all declared upfront
        epsilon: Per-user privacy budget
        queries_per_user: How many queries each user answers; the budget is
            split evenly between them
        factory: Builds the randomizer for a query at a given epsilon
    """

    def __init__(
        self,
        queries: Sequence[StatQuery],
        epsilon: float,
        queries_per_user: int = 1,
        factory: RandomizerFactory = rr_randomizer,
    ):
        if not queries:
            raise ParameterError("A protocol needs at least one query")
        if queries_per_user < 1 or queries_per_user > len(queries):
            raise ParameterError(
                f"queries_per_user must lie in [1, {len(queries)}], got {queries_per_user}"
            )
        self.queries = list(queries)
        self.epsilon = float(epsilon)
        self.queries_per_user = queries_per_user
        self.randomizers = [factory(h, self.epsilon / queries_per_user) for h in self.queries]
        self._ran = False

    def assign(self, n_users: int) -> List[List[int]]:
        """Round-robin assignment so query loads differ by at most one."""
        k, q = len(self.queries), self.queries_per_user
        return [[(user * q + j) % k for j in range(q)] for user in range(n_users)]

    def check_budget(self, assignments: List[List[int]]):
        for user, assigned in enumerate(assignments):
            spent = sum(self.randomizers[i].epsilon for i in assigned)
            if spent > self.epsilon * (1 + 1e-12):
                raise BudgetExceeded(
                    f"User {user} spends {spent:.6g} above the budget {self.epsilon:.6g}"
                )

    def run(
        self,
        pool: UserPool,
        rng: np.random.Generator,
        assignments: Optional[List[List[int]]] = None,
        seed: Optional[int] = None,
    ) -> ProtocolRun:
        """Collect one message per (user, assigned query) and aggregate.

        Raises:
            AdaptivityViolation: If the protocol already ran
            BudgetExceeded: If a user's epsilons exceed the budget
            SampleReuse: If a user's sample was read before
        """
        if self._ran:
            raise AdaptivityViolation("A non-interactive protocol runs exactly once")
        self._ran = True
        assignments = self.assign(len(pool)) if assignments is None else assignments
        self.check_budget(assignments)

        X, y = pool.take(range(len(assignments)))
        per_query: List[List[float]] = [[] for _ in self.queries]
        run = ProtocolRun(
            self.epsilon, [h.descriptor for h in self.queries], assignments, seed=seed
        )
        for i, randomizer in enumerate(self.randomizers):
            users = np.array([u for u, assigned in enumerate(assignments) if i in assigned])
            if users.size == 0:
                continue
            messages = randomizer.randomize(rng, X[users], y[users])
            per_query[i] = randomizer.estimate(messages).tolist()
            run.messages.extend(
                {
                    "user_id": int(u),
                    "randomizer_id": randomizer.randomizer_id,
                    "message": _plain(m),
                }
                for u, m in zip(users, messages)
            )
        run.messages.sort(key=lambda record: (record["user_id"], record["randomizer_id"]))

        for i, (h, randomizer) in enumerate(zip(self.queries, self.randomizers)):
            n = len(per_query[i])
            mean = float(np.mean(per_query[i])) if n else math.nan
            std_error = math.sqrt(randomizer.variance_bound / n) if n else math.inf
            run.estimates.append(QueryEstimate(h.descriptor, mean, std_error, n))
        _logger.debug(
            "Protocol over %d users and %d queries at epsilon=%g",
            len(assignments),
            len(self.queries),
            self.epsilon,
        )
        return run


def run_noninteractive(
    queries: Sequence[StatQuery],
    epsilon: float,
    n_users: int,
    inst: HardInstance,
    rng: np.random.Generator,
    queries_per_user: int = 1,
    factory: RandomizerFactory = rr_randomizer,
) -> ProtocolRun:
    """Draw n_users samples from ``inst`` and run the protocol on them."""
    pool = UserPool(inst.sample(rng, n_users))
    return NonInteractiveProtocol(queries, epsilon, queries_per_user, factory).run(pool, rng)


class LdpPolicy(BasePolicy):
    """Answers a non-adaptive oracle session with one run of the local protocol.

    Estimates carry sampling and privacy noise instead of a tau guarantee.
    Single queries are refused, since the protocol has one round only.
    """

    def __init__(
        self,
        inst: HardInstance,
        epsilon: float,
        n_users: int,
        rng: np.random.Generator,
        queries_per_user: int = 1,
        factory: RandomizerFactory = rr_randomizer,
    ):
        self.inst = inst
        self.epsilon = epsilon
        self.n_users = n_users
        self.queries_per_user = queries_per_user
        self.factory = factory
        self._rng = rng
        self.last_run: Optional[ProtocolRun] = None

    def answer(self, h: StatQuery, tau: float) -> PolicyAnswer:
        raise AdaptivityViolation("The local protocol only answers a declared query set")

    def answer_batch(self, queries: Sequence[StatQuery], tau: float) -> List[PolicyAnswer]:
        run = run_noninteractive(
            queries,
            self.epsilon,
            self.n_users,
            self.inst,
            self._rng,
            min(self.queries_per_user, len(queries)),
            self.factory,
        )
        self.last_run = run
        return [
            PolicyAnswer(item.estimate, {"std_error": item.std_error}, "ldp")
            for item in run.estimates
        ]
