"""Laguerre and P-orthonormal polynomials in extended precision.

P is the mixture (1 - eta) * delta_0 + eta * Exp(1). Its raw moments are
1 and eta * m! so every inner product under P has a closed form: expand
the product polynomial and sum coefficient times moment.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple, TypeVar, Union
import functools
import logging
import math
import threading

import mpmath
from mpmath import mp, mpf
import numpy as np

from sqsep.errors import OrthonormalityFailure, ParameterError


_logger = logging.getLogger("sqsep.console")

WORKING_DPS = 50

Number = Union[int, float, Fraction, mpf]
F = TypeVar("F", bound=Callable)

# mpmath keeps its precision in one process-wide context
_precision_lock = threading.RLock()


def extended_precision(fn: F) -> F:
    """Run ``fn`` at WORKING_DPS digits and restore the caller's precision."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with _precision_lock, mp.workdps(WORKING_DPS):
            return fn(*args, **kwargs)

    return wrapper  # type: ignore[return-value]


@extended_precision
def to_mpf(value: Number) -> mpf:
    """Convert ints, floats, Fractions and mpf values to mpf."""
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    return mpf(value)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial; ``coefficients[i]`` multiplies ``x**i``."""

    coefficients: Tuple[mpf, ...]

    @extended_precision
    def __post_init__(self):
        coeffs = [to_mpf(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [mpf(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports 0."""
        return len(self.coefficients) - 1

    @property
    def leading(self) -> mpf:
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0

    @extended_precision
    def __call__(self, x: Number) -> mpf:
        return mpmath.polyval(list(reversed(self.coefficients)), to_mpf(x))

    @extended_precision
    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [mpf(0)] * (n - len(self.coefficients))
        b = list(other.coefficients) + [mpf(0)] * (n - len(other.coefficients))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    @extended_precision
    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [mpf(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    @extended_precision
    def scale(self, factor: Number) -> "Polynomial":
        factor = to_mpf(factor)
        return Polynomial(tuple(factor * c for c in self.coefficients))

    def to_floats(self) -> np.ndarray:
        """Coefficients as float64, lowest degree first."""
        return np.array([float(c) for c in self.coefficients], dtype=float)

    @extended_precision
    def real_roots(self, tolerance: float = 1e-12) -> List[mpf]:
        """Real roots, located by companion-matrix eigenvalues and refined by bisection.

        Args:
            tolerance: Imaginary parts below this (relative) are treated as zero

        Returns:
            Sorted list of refined real roots
        """
        if self.degree < 1:
            return []
        estimates = np.polynomial.polynomial.polyroots(self.to_floats())
        roots = []
        for estimate in np.atleast_1d(estimates):
            if abs(estimate.imag) > 1e-8 * max(1.0, abs(estimate.real)):
                continue
            roots.append(self._refine_root(float(estimate.real), tolerance))
        return sorted(roots)

    def _refine_root(self, estimate: float, tolerance: float) -> mpf:
        delta = 1e-8 * max(1.0, abs(estimate))
        while delta < 1e-2 * max(1.0, abs(estimate)):
            lo, hi = mpf(estimate) - delta, mpf(estimate) + delta
            if self(lo) * self(hi) < 0:
                return mpmath.findroot(
                    self, (lo, hi), solver="bisect", maxsteps=400, verify=False
                )
            delta *= 10
        # no sign change: even-multiplicity root, polish with secant steps
        _logger.debug("No bracket around root estimate %.6g", estimate)
        root = mpmath.findroot(self, mpf(estimate), verify=False)
        if abs(self(root)) > tolerance:
            raise ArithmeticError(f"Root refinement failed near {estimate:.6g}")
        return root


def laguerre(m: int) -> Polynomial:
    """Laguerre polynomial L_m(x) = sum_i C(m, i) (-1)^i / i! x^i.

    Coefficients are formed as exact rationals before conversion.
    """
    if m < 0:
        raise ValueError(f"Laguerre degree must be nonnegative, got {m}")
    coeffs = [
        Fraction((-1) ** i * math.comb(m, i), math.factorial(i)) for i in range(m + 1)
    ]
    return Polynomial(tuple(coeffs))


@extended_precision
def moments_p(eta: Number, upto: int) -> List[Union[Fraction, mpf]]:
    """Raw moments of P up to order ``upto`` inclusive.

    Element m is 1 for m = 0 and eta * m! otherwise. A Fraction eta yields
    exact Fractions, anything else yields mpf values.
    """
    if upto < 0:
        raise ValueError(f"Moment order must be nonnegative, got {upto}")
    if isinstance(eta, Fraction):
        return [Fraction(1)] + [eta * math.factorial(m) for m in range(1, upto + 1)]
    eta = to_mpf(eta)
    return [mpf(1)] + [eta * mpmath.factorial(m) for m in range(1, upto + 1)]


@extended_precision
def inverse_square_normalizer(eta: Number, m: int):
    """mu_m^{-2} = eta (m + c)^2 + eta m + eta^2 / (1 - eta), with c = eta / (1 - eta).

    Exact when ``eta`` is a Fraction.
    """
    if not isinstance(eta, Fraction):
        eta = to_mpf(eta)
    c = eta / (1 - eta)
    return eta * (m + c) ** 2 + eta * m + eta**2 / (1 - eta)


@extended_precision
def inner_product(f: Polynomial, g: Polynomial, eta: Number) -> mpf:
    """<f, g>_P computed from the closed-form moments of P."""
    product = f * g
    moments = moments_p(to_mpf(eta), product.degree)
    return mpmath.fsum(c * mom for c, mom in zip(product.coefficients, moments))


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal polynomials p_0..p_k of P with positive leading coefficients."""

    eta: mpf
    k: int
    polys: Tuple[Polynomial, ...]
    mus: Tuple[mpf, ...]
    gram_error: float = 0.0

    @extended_precision
    def evaluate(self, x: Number) -> List[mpf]:
        return [p(x) for p in self.polys]

    @extended_precision
    def kernel(self, x0: Number) -> Polynomial:
        """Reproducing kernel y -> sum_i p_i(x0) p_i(y)."""
        total = Polynomial((0,))
        for value, poly in zip(self.evaluate(x0), self.polys):
            total = total + poly.scale(value)
        return total

    def coefficient(self, m: int, i: int) -> mpf:
        coeffs = self.polys[m].coefficients
        return coeffs[i] if i < len(coeffs) else mpf(0)


@extended_precision
def ortho_basis(eta: Number, k: int, tolerance: float = 1e-9) -> OrthoBasis:
    """Build the P-orthonormal basis p_0..p_k.

    p_m = mu_m ((m + c) L_m - sum_{l<m} L_l), whose coefficient of x^i is
    mu_m ((m + c) C(m, i) - C(m, i + 1)) (-1)^i / i!. The sign (-1)^m makes the
    leading coefficient positive.

    Args:
        eta: Weight of the exponential component, in (0, 1)
        k: Maximum degree
        tolerance: Allowed deviation of the Gram matrix from the identity

    Returns:
        Verified OrthoBasis

    Raises:
        ParameterError: If eta or k is out of range
        OrthonormalityFailure: If the Gram matrix check fails
    """
    if k < 0:
        raise ParameterError(f"Basis degree must be nonnegative, got {k}")
    eta = to_mpf(eta)
    if not 0 < eta < 1:
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")
    if eta > 0.5:
        _logger.debug("Orthogonal basis requested outside eta <= 1/2 (eta=%s)", eta)

    c = eta / (1 - eta)
    polys, mus = [], []
    for m in range(k + 1):
        mu = 1 / mpmath.sqrt(inverse_square_normalizer(eta, m))
        if m == 0:
            # mu_0 * c is 1 only up to rounding
            polys.append(Polynomial((1,)))
            mus.append(mu)
            continue
        sign = -1 if m % 2 else 1
        coeffs = [
            sign
            * mu
            * ((m + c) * math.comb(m, i) - math.comb(m, i + 1))
            * (-1) ** i
            / mpmath.factorial(i)
            for i in range(m + 1)
        ]
        polys.append(Polynomial(tuple(coeffs)))
        mus.append(mu)

    gram_error = 0.0
    for m in range(k + 1):
        for l in range(m + 1):
            expected = 1 if m == l else 0
            deviation = float(abs(inner_product(polys[m], polys[l], eta) - expected))
            gram_error = max(gram_error, deviation)
    if gram_error > tolerance:
        raise OrthonormalityFailure(
            f"Gram matrix deviates by {gram_error:.3e} (eta={eta}, k={k})"
        )
    return OrthoBasis(eta, k, tuple(polys), tuple(mus), gram_error)


@extended_precision
def rho(basis: OrthoBasis, x: Number) -> mpf:
    """Christoffel function rho_k(x) = 1 / sum_i p_i(x)^2, a value in (0, 1]."""
    return 1 / mpmath.fsum(v**2 for v in basis.evaluate(x))


@extended_precision
def coefficient_bound_violations(basis: OrthoBasis) -> List[Tuple[int, int]]:
    """Coefficients exceeding |xi_{m,i}| <= C(m,i)/(i! sqrt(eta)) (i >= 1) or
    |xi_{m,0}| <= 2 sqrt(eta)/m (m >= 1).

    Returns:
        (m, i) pairs that violate their bound
    """
    root_eta = mpmath.sqrt(basis.eta)
    violations = []
    for m in range(1, basis.k + 1):
        if abs(basis.coefficient(m, 0)) > 2 * root_eta / m:
            violations.append((m, 0))
        for i in range(1, m + 1):
            bound = math.comb(m, i) / (mpmath.factorial(i) * root_eta)
            if abs(basis.coefficient(m, i)) > bound:
                violations.append((m, i))
    return violations


def gram_matrix(basis: OrthoBasis) -> np.ndarray:
    """Gram matrix of the basis under P, as float64."""
    size = basis.k + 1
    gram = np.empty((size, size))
    for m in range(size):
        for l in range(size):
            gram[m, l] = float(inner_product(basis.polys[m], basis.polys[l], basis.eta))
    return gram
