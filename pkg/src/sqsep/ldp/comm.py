"""Bounded-communication oracle.

Each user sends ``ell`` bits computed from their own sample by an extractor
fixed before the run. No privacy claim is attached, so extractors are not
audited.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging
import math

import numpy as np

from sqsep import utils
from sqsep.errors import AdaptivityViolation, ParameterError
from sqsep.ldp.protocol import UserPool
from sqsep.sq.queries import StatQuery, vector_digest


_logger = logging.getLogger("sqsep.console")


@dataclass(frozen=True)
class CommExtractor:
    """Map from a labeled sample to a message in {0, ..., 2^ell - 1}.

    Attributes:
        ell: Message length in bits
        fn: Vectorized extractor, (X, y) -> integer messages
        descriptor: Stable name used in transcripts
        decode: Optional map from messages back to a real value
    """

    ell: int
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    descriptor: str
    decode: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.ell < 1:
            raise ParameterError(f"ell must be at least 1, got {self.ell}")

    @property
    def message_space(self) -> range:
        return range(2**self.ell)

    def __call__(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        messages = np.asarray(self.fn(X, y), dtype=np.int64)
        if np.any(messages < 0) or np.any(messages >= 2**self.ell):
            raise ParameterError(f"{self.descriptor} produced a message outside {self.ell} bits")
        return messages


def sign_bit(h: StatQuery) -> CommExtractor:
    """One bit: whether h(z) >= 0. Decodes to +-1."""
    return CommExtractor(
        1,
        lambda X, y: (h(X, y) >= 0).astype(np.int64),
        f"sign[{h.descriptor}]",
        decode=lambda m: 2.0 * np.asarray(m, dtype=float) - 1.0,
    )


def quantizer(w: np.ndarray, ell: int) -> CommExtractor:
    """Uniform ell-bit quantizer of <w, x> / (|w| |x|) on [-1, 1].

    Cells have width 2^(1 - ell) and decode to their midpoints, so the
    reconstruction error is at most 2^-ell.
    """
    w = np.asarray(w, dtype=float)
    norm = float(np.linalg.norm(w))
    if norm == 0:
        raise ParameterError("Cannot quantize against the zero vector")
    cells = 2**ell
    width = 2.0 / cells

    def project(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        lengths = np.linalg.norm(X, axis=1)
        return np.divide(X @ w, norm * lengths, out=np.zeros(len(X)), where=lengths > 0)

    def extract(X: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.clip(np.floor((project(X) + 1.0) / width), 0, cells - 1).astype(np.int64)

    return CommExtractor(
        ell,
        extract,
        f"quant[{ell},{vector_digest(w)}]",
        decode=lambda m: -1.0 + (np.asarray(m, dtype=float) + 0.5) * width,
    )


def comm_oracle(extractor: CommExtractor, pool: UserPool, user_id: int) -> int:
    """Read one user's sample once and return its message.

    Raises:
        SampleReuse: If the user's sample was already read
    """
    X, y = pool.take([user_id])
    return int(extractor(X, y)[0])


@dataclass
class CommRun:
    """Messages of one bounded-communication round."""

    ell: int
    descriptors: List[str]
    messages: List[Dict[str, Any]] = field(default_factory=list)
    decoded_means: List[float] = field(default_factory=list)

    @property
    def bits(self) -> int:
        return self.ell * len(self.messages)

    def header(self) -> Dict[str, Any]:
        return {"ell": self.ell, "extractors": self.descriptors, "users": len(self.messages)}

    def write_transcript(self, file: str):
        utils.write_jsonl(file, self.messages, header=self.header())


def run_comm(extractors: Sequence[CommExtractor], pool: UserPool) -> CommRun:
    """Give every user one extractor round-robin and collect the messages.

    Raises:
        AdaptivityViolation: If any sample of the pool was read before
        ParameterError: If the extractors disagree on ell
    """
    if not extractors:
        raise ParameterError("A round needs at least one extractor")
    lengths = {extractor.ell for extractor in extractors}
    if len(lengths) != 1:
        raise ParameterError(f"Extractors use different message lengths {sorted(lengths)}")
    if pool.accessed:
        raise AdaptivityViolation("Extractors must be fixed before any sample is read")

    ell = lengths.pop()
    X, y = pool.take(range(len(pool)))
    run = CommRun(ell, [extractor.descriptor for extractor in extractors])
    for i, extractor in enumerate(extractors):
        users = np.arange(i, len(pool), len(extractors))
        messages = extractor(X[users], y[users]) if users.size else np.zeros(0, dtype=np.int64)
        run.messages.extend(
            {"user_id": int(u), "randomizer_id": extractor.descriptor, "message": int(m)}
            for u, m in zip(users, messages)
        )
        if extractor.decode is not None and users.size:
            run.decoded_means.append(float(np.mean(extractor.decode(messages))))
        else:
            run.decoded_means.append(math.nan)
    run.messages.sort(key=lambda record: record["user_id"])
    _logger.debug("Communication round: %d users, %d bits", len(pool), run.bits)
    return run


@dataclass(frozen=True)
class CommSqCost:
    """Non-adaptive queries and tolerance that simulate one round."""

    queries: int
    tolerance: float

    def as_dict(self) -> Dict[str, Any]:
        return {"queries": self.queries, "tolerance": self.tolerance}


def comm_sq_cost(n: int, ell: int, delta: float) -> CommSqCost:
    """2 n ell queries of tolerance delta / (2^(ell+1) n) simulate n users.

    Args:
        n: Number of users
        ell: Bits per user
        delta: Allowed failure probability of the simulation
    """
    if n < 1 or ell < 1:
        raise ParameterError(f"n and ell must be positive, got n={n}, ell={ell}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    return CommSqCost(2 * n * ell, delta / (2 ** (ell + 1) * n))
