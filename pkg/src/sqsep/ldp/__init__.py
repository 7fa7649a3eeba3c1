"""Local randomizers, the non-interactive protocol and the communication oracle."""

from .randomizers import (
    AUDIT_SLACK,
    ComposedRandomizer,
    ConstantRandomizer,
    LocalRandomizer,
    Passthrough,
    RandomizedResponse,
    audit_epsilon,
    extreme_probes,
    rr_randomizer,
)
from .protocol import (
    LdpPolicy,
    NonInteractiveProtocol,
    ProtocolRun,
    QueryEstimate,
    UserPool,
    run_noninteractive,
)
from .comm import (
    CommExtractor,
    CommRun,
    CommSqCost,
    comm_oracle,
    comm_sq_cost,
    quantizer,
    run_comm,
    sign_bit,
)

__all__ = [
    "AUDIT_SLACK",
    "ComposedRandomizer",
    "ConstantRandomizer",
    "LocalRandomizer",
    "Passthrough",
    "RandomizedResponse",
    "audit_epsilon",
    "extreme_probes",
    "rr_randomizer",
    "LdpPolicy",
    "NonInteractiveProtocol",
    "ProtocolRun",
    "QueryEstimate",
    "UserPool",
    "run_noninteractive",
    "CommExtractor",
    "CommRun",
    "CommSqCost",
    "comm_oracle",
    "comm_sq_cost",
    "quantizer",
    "run_comm",
    "sign_bit",
]
