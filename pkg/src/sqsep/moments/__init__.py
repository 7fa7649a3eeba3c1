"""Package for sqsep moments: the one-dimensional moment-problem machinery."""

from .polynomials import (
    WORKING_DPS,
    extended_precision,
    Polynomial,
    OrthoBasis,
    laguerre,
    ortho_basis,
    rho,
    moments_p,
    inner_product,
    inverse_square_normalizer,
    coefficient_bound_violations,
    gram_matrix,
)
from .measures import (
    AtomicMeasure,
    HybridMeasure,
    MixtureP,
    tail_mass,
    tail_bound,
    base_tv,
)
from .construction import (
    ConstructionParams,
    RescaleAudit,
    construct_q,
    rescale_and_condition,
    audit_rescaled,
)
from .serialization import to_document, from_document

__all__ = [
    "WORKING_DPS",
    "extended_precision",
    "Polynomial",
    "OrthoBasis",
    "laguerre",
    "ortho_basis",
    "rho",
    "moments_p",
    "inner_product",
    "inverse_square_normalizer",
    "coefficient_bound_violations",
    "gram_matrix",
    "AtomicMeasure",
    "HybridMeasure",
    "MixtureP",
    "tail_mass",
    "tail_bound",
    "base_tv",
    "ConstructionParams",
    "RescaleAudit",
    "construct_q",
    "rescale_and_condition",
    "audit_rescaled",
    "to_document",
    "from_document",
]
