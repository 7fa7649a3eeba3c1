"""JSON documents for measures and bases with decimal-string numerics.

Numbers are written with ``mpmath.nstr`` so certificates diff cleanly and
never pass through binary floats. Schema::

    {"type": "atomic", "atoms": [["<x>", "<w>"], ...], "conditioned_mass": "<m>"}
    {"type": "hybrid", "atom": ["<x>", "<w>"], "exp_weight": "<w>",
     "scale": "<s>", "shift": "<t>", "truncation": ["<lo>", "<hi>"],
     "conditioned_mass": "<m>"}
    {"type": "ortho_basis", "eta": "<eta>", "k": k,
     "polys": [["<c0>", "<c1>", ...], ...], "mus": ["<mu0>", ...]}
"""

from typing import Any, Dict, Union

import mpmath
from mpmath import mpf

from sqsep.moments.measures import AtomicMeasure, HybridMeasure
from sqsep.moments.polynomials import OrthoBasis, Polynomial, extended_precision


DIGITS = 30


def dec(value) -> str:
    """Decimal string for a real value ("inf" for infinities)."""
    value = mpf(value)
    if mpmath.isinf(value):
        return "inf" if value > 0 else "-inf"
    return mpmath.nstr(value, DIGITS, strip_zeros=True)


def to_document(obj: Union[AtomicMeasure, HybridMeasure, OrthoBasis]) -> Dict[str, Any]:
    """Serialize a measure or basis to a JSON-ready dictionary."""
    if isinstance(obj, AtomicMeasure):
        return {
            "type": "atomic",
            "atoms": [[dec(x), dec(w)] for x, w in zip(obj.locations, obj.weights)],
            "conditioned_mass": dec(obj.conditioned_mass),
        }
    if isinstance(obj, HybridMeasure):
        return {
            "type": "hybrid",
            "atom": [dec(obj.atom_location), dec(obj.atom_weight)],
            "exp_weight": dec(obj.exp_weight),
            "scale": dec(obj.scale),
            "shift": dec(obj.shift),
            "truncation": [dec(t) for t in obj.truncation],
            "conditioned_mass": dec(obj.conditioned_mass),
        }
    if isinstance(obj, OrthoBasis):
        return {
            "type": "ortho_basis",
            "eta": dec(obj.eta),
            "k": obj.k,
            "polys": [[dec(c) for c in p.coefficients] for p in obj.polys],
            "mus": [dec(mu) for mu in obj.mus],
        }
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


@extended_precision
def from_document(doc: Dict[str, Any]) -> Union[AtomicMeasure, HybridMeasure, OrthoBasis]:
    """Inverse of ``to_document``."""
    kind = doc.get("type")
    if kind == "atomic":
        return AtomicMeasure(
            tuple(mpf(x) for x, _ in doc["atoms"]),
            tuple(mpf(w) for _, w in doc["atoms"]),
            conditioned_mass=float(doc.get("conditioned_mass", "0")),
        )
    if kind == "hybrid":
        return HybridMeasure(
            mpf(doc["atom"][0]),
            mpf(doc["atom"][1]),
            mpf(doc["exp_weight"]),
            mpf(doc["scale"]),
            mpf(doc["shift"]),
            tuple(mpf(t) for t in doc["truncation"]),
            conditioned_mass=float(doc.get("conditioned_mass", "0")),
        )
    if kind == "ortho_basis":
        return OrthoBasis(
            mpf(doc["eta"]),
            int(doc["k"]),
            tuple(Polynomial(tuple(mpf(c) for c in p)) for p in doc["polys"]),
            tuple(mpf(mu) for mu in doc["mus"]),
        )
    raise ValueError(f"Unknown document type: {kind}")
