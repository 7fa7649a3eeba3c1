"""Measures on the real line used by the construction.

AtomicMeasure carries Q, Q' and quadrature rules. HybridMeasure is an atom
plus a (possibly truncated) affine image of Exp(1); it carries P and P'
with closed-form moments through lower incomplete gamma integrals.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple
import math

import mpmath
from mpmath import mpf
import numpy as np

from sqsep.errors import InvalidMeasure, NegativeWeight, ParameterError
from sqsep.moments.polynomials import Number, extended_precision, to_mpf


WEIGHT_TOLERANCE = 1e-12


def _check_weights(weights: Sequence[mpf]):
    for w in weights:
        if w < -WEIGHT_TOLERANCE:
            raise NegativeWeight(f"Measure weight {mpmath.nstr(w, 8)} is negative")
    total = mpmath.fsum(weights)
    if abs(total - 1) > WEIGHT_TOLERANCE:
        raise InvalidMeasure(f"Measure weights sum to {mpmath.nstr(total, 15)}, not 1")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported probability measure, atoms sorted by location.

    ``conditioned_mass`` records the mass dropped by the conditioning step
    that produced this measure (0 for unconditioned measures).
    """

    locations: Tuple[mpf, ...]
    weights: Tuple[mpf, ...]
    conditioned_mass: float = 0.0

    @extended_precision
    def __post_init__(self):
        if len(self.locations) != len(self.weights) or not self.locations:
            raise InvalidMeasure("Atomic measure needs matching, nonempty atoms and weights")
        pairs = sorted(
            ((to_mpf(x), to_mpf(w)) for x, w in zip(self.locations, self.weights)),
            key=lambda pair: pair[0],
        )
        locations = tuple(x for x, _ in pairs)
        weights = tuple(w for _, w in pairs)
        for left, right in zip(locations, locations[1:]):
            if right - left <= 1e-15 * max(1, abs(left)):
                raise InvalidMeasure(f"Repeated atom at {mpmath.nstr(left, 12)}")
        _check_weights(weights)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[Number, Number]]) -> "AtomicMeasure":
        return cls(tuple(x for x, _ in pairs), tuple(w for _, w in pairs))

    @classmethod
    def point_mass(cls, location: Number) -> "AtomicMeasure":
        return cls((location,), (1,))

    def __len__(self) -> int:
        return len(self.locations)

    @extended_precision
    def moment(self, j: int) -> mpf:
        return mpmath.fsum(w * x**j for x, w in zip(self.locations, self.weights))

    def moments(self, upto: int) -> List[mpf]:
        return [self.moment(j) for j in range(upto + 1)]

    @extended_precision
    def expect(self, fn: Callable[[mpf], mpf]) -> mpf:
        return mpmath.fsum(w * fn(x) for x, w in zip(self.locations, self.weights))

    @extended_precision
    def weight_at(self, location: Number, tolerance: float = 1e-12) -> mpf:
        """Weight of the atom within ``tolerance`` of ``location`` (0 if none)."""
        location = to_mpf(location)
        for x, w in zip(self.locations, self.weights):
            if abs(x - location) <= tolerance:
                return w
        return mpf(0)

    @extended_precision
    def mass_in(self, lo: Number, hi: Number) -> mpf:
        lo, hi = to_mpf(lo), to_mpf(hi)
        return mpmath.fsum(w for x, w in zip(self.locations, self.weights) if lo <= x <= hi)

    @extended_precision
    def affine(self, scale: Number, shift: Number) -> "AtomicMeasure":
        """Law of scale * X + shift."""
        scale, shift = to_mpf(scale), to_mpf(shift)
        if scale == 0:
            raise ParameterError("Affine scale must be nonzero")
        return AtomicMeasure(
            tuple(scale * x + shift for x in self.locations), self.weights
        )

    def negate(self) -> "AtomicMeasure":
        return self.affine(-1, 0)

    @extended_precision
    def condition(self, lo: Number, hi: Number) -> "AtomicMeasure":
        """Condition on [lo, hi]; atoms outside are dropped and weights renormalized."""
        kept = self.mass_in(lo, hi)
        if kept <= 0:
            raise InvalidMeasure("Conditioning interval carries no mass")
        lo, hi = to_mpf(lo), to_mpf(hi)
        pairs = [
            (x, w / kept)
            for x, w in zip(self.locations, self.weights)
            if lo <= x <= hi and w > 0
        ]
        return AtomicMeasure(
            tuple(x for x, _ in pairs),
            tuple(w for _, w in pairs),
            conditioned_mass=float(1 - kept),
        )

    def support_bounds(self) -> Tuple[float, float]:
        support = [x for x, w in zip(self.locations, self.weights) if w > 0]
        return float(min(support)), float(max(support))

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(locations, weights) as float64 arrays."""
        return (
            np.array([float(x) for x in self.locations]),
            np.array([float(w) for w in self.weights]),
        )

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        locations, weights = self.as_arrays()
        return rng.choice(locations, size=n, p=weights / weights.sum())


@dataclass(frozen=True)
class HybridMeasure:
    """Atom plus the law of ``shift + scale * E`` with E ~ Exp(1) restricted to
    ``truncation`` (an interval in E-space, default [0, inf)).

    Fields:
        atom_location, atom_weight: The point mass
        exp_weight: Total weight of the exponential component
        scale, shift: Affine map applied to E (scale > 0)
        truncation: (lo, hi) bounds on E, hi may be +inf
        conditioned_mass: Mass dropped by the conditioning that produced it
    """

    atom_location: mpf
    atom_weight: mpf
    exp_weight: mpf
    scale: mpf = mpf(1)
    shift: mpf = mpf(0)
    truncation: Tuple[mpf, mpf] = field(default=(mpf(0), mpmath.inf))
    conditioned_mass: float = 0.0

    @extended_precision
    def __post_init__(self):
        for name in ("atom_location", "atom_weight", "exp_weight", "scale", "shift"):
            object.__setattr__(self, name, to_mpf(getattr(self, name)))
        lo, hi = (to_mpf(t) for t in self.truncation)
        object.__setattr__(self, "truncation", (lo, hi))
        if self.scale <= 0:
            raise ParameterError("Exponential component needs a positive scale")
        if lo < 0 or hi <= lo:
            raise ParameterError(f"Invalid truncation interval [{lo}, {hi}]")
        _check_weights((self.atom_weight, self.exp_weight))

    def _exp_norm(self) -> mpf:
        lo, hi = self.truncation
        return mpmath.gammainc(1, lo, hi)

    def _exp_raw_moment(self, i: int) -> mpf:
        """E[E^i] for E ~ Exp(1) restricted to the truncation interval."""
        lo, hi = self.truncation
        return mpmath.gammainc(i + 1, lo, hi) / self._exp_norm()

    @extended_precision
    def moment(self, j: int) -> mpf:
        total = self.atom_weight * self.atom_location**j
        if self.exp_weight > 0:
            exp_part = mpmath.fsum(
                math.comb(j, i)
                * self.scale**i
                * self.shift ** (j - i)
                * self._exp_raw_moment(i)
                for i in range(j + 1)
            )
            total += self.exp_weight * exp_part
        return total

    def moments(self, upto: int) -> List[mpf]:
        return [self.moment(j) for j in range(upto + 1)]

    @extended_precision
    def expect(self, fn: Callable[[mpf], mpf]) -> mpf:
        """E[fn(X)], with adaptive quadrature over the exponential part."""
        total = self.atom_weight * fn(self.atom_location)
        if self.exp_weight > 0:
            lo, hi = self.truncation
            integral = mpmath.quad(
                lambda e: fn(self.shift + self.scale * e) * mpmath.exp(-e), [lo, hi]
            )
            total += self.exp_weight * integral / self._exp_norm()
        return total

    @extended_precision
    def weight_at(self, location: Number, tolerance: float = 1e-12) -> mpf:
        if abs(self.atom_location - to_mpf(location)) <= tolerance:
            return self.atom_weight
        return mpf(0)

    def _exp_range(self, lo: Number, hi: Number) -> Tuple[mpf, mpf]:
        t_lo, t_hi = self.truncation
        a = max(t_lo, (to_mpf(lo) - self.shift) / self.scale)
        b = min(t_hi, (to_mpf(hi) - self.shift) / self.scale)
        return a, b

    @extended_precision
    def mass_in(self, lo: Number, hi: Number) -> mpf:
        mass = self.atom_weight if to_mpf(lo) <= self.atom_location <= to_mpf(hi) else mpf(0)
        a, b = self._exp_range(lo, hi)
        if self.exp_weight > 0 and a < b:
            mass += self.exp_weight * mpmath.gammainc(1, a, b) / self._exp_norm()
        return mass

    @extended_precision
    def affine(self, scale: Number, shift: Number) -> "HybridMeasure":
        """Law of scale * X + shift for scale > 0."""
        scale, shift = to_mpf(scale), to_mpf(shift)
        if scale <= 0:
            raise ParameterError("Hybrid measures support positive affine scales only")
        return HybridMeasure(
            scale * self.atom_location + shift,
            self.atom_weight,
            self.exp_weight,
            scale * self.scale,
            scale * self.shift + shift,
            self.truncation,
        )

    @extended_precision
    def condition(self, lo: Number, hi: Number) -> "HybridMeasure":
        """Condition on [lo, hi], keeping the exponential part semi-analytic."""
        kept = self.mass_in(lo, hi)
        if kept <= 0:
            raise ParameterError("Conditioning interval carries no mass")
        in_atom = to_mpf(lo) <= self.atom_location <= to_mpf(hi)
        atom_weight = self.atom_weight / kept if in_atom else mpf(0)
        a, b = self._exp_range(lo, hi)
        if self.exp_weight > 0 and a < b:
            exp_weight = self.exp_weight * mpmath.gammainc(1, a, b) / self._exp_norm() / kept
            truncation = (a, b)
        else:
            exp_weight, truncation = mpf(0), self.truncation
        return HybridMeasure(
            self.atom_location,
            atom_weight,
            exp_weight,
            self.scale,
            self.shift,
            truncation,
            conditioned_mass=float(1 - kept),
        )

    def support_bounds(self) -> Tuple[float, float]:
        points = []
        if self.atom_weight > 0:
            points.append(self.atom_location)
        if self.exp_weight > 0:
            lo, hi = self.truncation
            points.extend([self.shift + self.scale * lo, self.shift + self.scale * hi])
        return float(min(points)), float(max(points))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        lo, hi = (float(t) for t in self.truncation)
        uniform = rng.random(n)
        span = -math.expm1(-(hi - lo)) if math.isfinite(hi) else 1.0
        e = lo - np.log1p(-rng.random(n) * span)
        values = float(self.shift) + float(self.scale) * e
        return np.where(uniform < float(self.atom_weight), float(self.atom_location), values)


@dataclass(frozen=True)
class MixtureP:
    """P = (1 - eta) * delta_0 + eta * Exp(1)."""

    eta: float

    @extended_precision
    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ParameterError(f"eta must lie in (0, 1), got {self.eta}")

    @extended_precision
    def moment(self, m: int) -> mpf:
        return mpf(1) if m == 0 else to_mpf(self.eta) * mpmath.factorial(m)

    def moments(self, upto: int) -> List[mpf]:
        return [self.moment(m) for m in range(upto + 1)]

    @extended_precision
    def as_measure(self) -> HybridMeasure:
        eta = to_mpf(self.eta)
        return HybridMeasure(mpf(0), 1 - eta, eta)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.as_measure().sample(rng, n)


@extended_precision
def tail_mass(measure, t: Number) -> mpf:
    """Mass of |x| >= t."""
    t = to_mpf(t)
    inner = measure.mass_in(-t, t)
    # the boundary points |x| = t belong to the tail
    boundary = measure.weight_at(t, 0) + (measure.weight_at(-t, 0) if t != 0 else 0)
    return 1 - inner + boundary


@extended_precision
def tail_bound(k: int, t: Number) -> mpf:
    """Generalized Markov bound (4t)^{-2k} on the tail of the rescaled images."""
    return (4 * to_mpf(t)) ** (-2 * k)


@extended_precision
def base_tv(first, second: AtomicMeasure) -> mpf:
    """Total variation between a measure and an atomic measure.

    The exponential part of a HybridMeasure is continuous, so it never
    overlaps atoms and contributes its full mass.
    """
    atoms = {}
    continuous = mpf(0)
    if isinstance(first, HybridMeasure):
        atoms[first.atom_location] = first.atom_weight
        continuous = first.exp_weight
    else:
        atoms.update(zip(first.locations, first.weights))
    diff = continuous
    matched = set()
    for x, w in zip(second.locations, second.weights):
        own = mpf(0)
        for y in atoms:
            if abs(x - y) <= 1e-12:
                own = atoms[y]
                matched.add(y)
                break
        diff += abs(own - w)
    diff += mpmath.fsum(w for y, w in atoms.items() if y not in matched)
    return diff / 2
