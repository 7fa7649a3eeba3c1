"""The moment-matched adversarial measure Q and the rescaled pair (P', Q').

Q is the canonical quadrature with one node fixed at -gamma': the remaining
nodes are the zeros of the kernel y -> K_k(-gamma', y) and every node gets
the Christoffel weight rho_k(node). Such a rule integrates polynomials of
degree <= 2k exactly against P, so Q matches the first 2k moments of P.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging
import math

import mpmath
from mpmath import mpf
import numpy as np
from scipy import optimize

from sqsep.errors import (
    ConditioningMassLoss,
    MomentMatchFailure,
    NegativeWeight,
    ParameterError,
)
from sqsep.moments.measures import (
    AtomicMeasure,
    HybridMeasure,
    MixtureP,
    base_tv,
    tail_bound,
)
from sqsep.moments.polynomials import (
    OrthoBasis,
    extended_precision,
    moments_p,
    ortho_basis,
    rho,
    to_mpf,
)


_logger = logging.getLogger("sqsep.console")


@dataclass(frozen=True)
class ConstructionParams:
    """Margin gamma and exponent r with the derived construction constants.

    eta = gamma^(1-r), gamma' = gamma^(1-2r/5), k = floor(gamma^(-2r/5)).
    Passing ``eta``, ``gamma_prime`` and ``k`` explicitly overrides the
    derivation (r may then be None), which is how stress configurations
    pin exact values.
    """

    gamma: float
    r: Optional[float]
    eta: Optional[float] = None
    gamma_prime: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.r is None:
            if None in (self.eta, self.gamma_prime, self.k):
                raise ParameterError("Without r, eta, gamma_prime and k must be given")
            return
        if not 0 < self.gamma < 1 or not 0 < self.r < 1:
            raise ParameterError(
                f"Need gamma in (0, 1) and r in (0, 1), got gamma={self.gamma}, r={self.r}"
            )
        if self.eta is None:
            object.__setattr__(self, "eta", self.gamma ** (1 - self.r))
        if self.gamma_prime is None:
            object.__setattr__(self, "gamma_prime", self.gamma ** (1 - 2 * self.r / 5))
        if self.k is None:
            # guard floor() against representation error at integer boundaries
            object.__setattr__(
                self, "k", int(math.floor(self.hardness_exponent * (1 + 1e-12)))
            )

    @classmethod
    def explicit(
        cls, eta: float, gamma_prime: float, k: int, gamma: Optional[float] = None
    ) -> "ConstructionParams":
        return cls(gamma if gamma is not None else gamma_prime, None, eta, gamma_prime, k)

    @property
    def hardness_exponent(self) -> float:
        """gamma^(-2r/5); falls back to k when r is not set."""
        if self.r is None:
            return float(self.k)
        return self.gamma ** (-2 * self.r / 5)

    @property
    def gamma_tilde(self) -> float:
        return self.gamma_prime / (16 * self.k + 2)

    @property
    def denominator(self) -> int:
        """8k + 1, the rescaling denominator."""
        return 8 * self.k + 1

    @property
    def min_dimension(self) -> int:
        """Smallest admissible cube dimension, ceil(gamma^(-2-2r/5))."""
        if self.r is None:
            raise ParameterError("Dimension requirement needs r")
        return int(math.ceil(self.gamma ** (-2 - 2 * self.r / 5) * (1 - 1e-12)))

    def conditioning_dimension(self, tau: float) -> int:
        """Smallest d with exp(-d gamma~^2 / 8) <= tau / 4.

        Below it the majority conditioning can move low-degree Fourier
        coefficients of the lift by more than the oracle tolerance.
        """
        if not 0 < tau < 4:
            raise ParameterError(f"Tolerance must lie in (0, 4), got {tau}")
        return int(math.ceil(8 * math.log(4 / tau) / self.gamma_tilde**2))

    def tau(self, c2: float) -> float:
        """Oracle tolerance exp(-c2 * gamma^(-2r/5))."""
        return math.exp(-c2 * self.hardness_exponent)

    def query_budget(self, c1: float) -> int:
        """Query budget floor(exp(c1 * gamma^(-2r/5)))."""
        return int(math.floor(math.exp(c1 * self.hardness_exponent)))

    def validate(self, strict_regime: bool = False) -> List[str]:
        """Check hard constraints and collect regime warnings.

        Args:
            strict_regime: Promote regime warnings to errors

        Returns:
            List of warning messages (already logged)

        Raises:
            ParameterError: On a violated hard constraint
        """
        if not 0 < self.eta < 1:
            raise ParameterError(f"eta={self.eta:.6g} outside (0, 1)")
        if not 0 < self.gamma_prime <= 0.5:
            raise ParameterError(f"gamma'={self.gamma_prime:.6g} outside (0, 1/2]")
        if self.k < 1:
            raise ParameterError("k=0: fewer than two moments to match")
        limit = self.eta * self.k ** -1.5
        if self.gamma_prime > limit * (1 + 1e-12):
            raise ParameterError(
                f"gamma'={self.gamma_prime:.6g} exceeds eta*k^(-3/2)={limit:.6g}"
            )

        warnings = []
        if self.eta > 0.5:
            warnings.append(f"eta={self.eta:.4f} > 1/2: outside the proven regime")
        if self.r is not None and self.gamma >= 2 ** (-1 / (1 - self.r)):
            warnings.append(
                f"gamma={self.gamma:.4f} >= 2^(-1/(1-r))={2 ** (-1 / (1 - self.r)):.4f}"
            )
        if warnings and strict_regime:
            raise ParameterError("; ".join(warnings))
        for message in warnings:
            _logger.warning("Regime warning: %s", message)
        return warnings

    def as_dict(self) -> Dict[str, float]:
        return {
            "gamma": self.gamma,
            "r": self.r,
            "eta": self.eta,
            "gamma_prime": self.gamma_prime,
            "k": self.k,
            "gamma_tilde": self.gamma_tilde,
        }


def _kernel_nodes(basis: OrthoBasis, x0: mpf) -> List[mpf]:
    kernel = basis.kernel(x0)
    nodes = kernel.real_roots()
    if len(nodes) != basis.k:
        raise ArithmeticError(
            f"Kernel has {len(nodes)} real roots, expected {basis.k}"
        )
    return nodes


def _discretized_rule(
    basis: OrthoBasis, x0: mpf, fixed_weight: mpf, grid_size: int = 2000
) -> Tuple[List[mpf], List[mpf]]:
    """Least-squares fallback: nonnegative weights on a grid, then polished nodes."""
    k = basis.k
    target = np.array([float(m) for m in moments_p(basis.eta, 2 * k)])
    residual = target - float(fixed_weight) * float(x0) ** np.arange(2 * k + 1)
    row_scale = np.maximum(1.0, np.abs(residual))

    grid = np.linspace(1e-6, 8.0 * k + 8.0, grid_size)
    design = grid[None, :] ** np.arange(2 * k + 1)[:, None] / row_scale[:, None]
    weights, _ = optimize.nnls(design, residual / row_scale)
    top = np.sort(grid[np.argsort(weights)[-k:]])
    start = np.concatenate([top, np.full(k, residual[0] / k)])

    def moment_residual(params):
        nodes, node_weights = params[:k], params[k:]
        powers = nodes[None, :] ** np.arange(2 * k + 1)[:, None]
        return (powers @ node_weights - residual) / row_scale

    lower = np.concatenate([np.full(k, 0.0), np.zeros(k)])
    upper = np.concatenate([np.full(k, np.inf), np.full(k, 1.0)])
    solution = optimize.least_squares(
        moment_residual,
        start,
        bounds=(lower, upper),
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=20000,
    )
    nodes = [mpf(float(v)) for v in solution.x[:k]]
    free = [mpf(float(v)) for v in solution.x[k:]]
    total = mpmath.fsum(free)
    # renormalize so the full rule is a probability measure
    free = [w * (1 - fixed_weight) / total for w in free]
    return nodes, free


@extended_precision
def construct_q(
    params: ConstructionParams,
    basis: Optional[OrthoBasis] = None,
    method: str = "kernel",
    tolerance: float = 1e-8,
) -> AtomicMeasure:
    """Build the moment-matched measure Q with an atom at -gamma'.

    Args:
        params: Validated construction parameters
        basis: Precomputed orthonormal basis for (eta, k)
        method: "kernel" (canonical representation) or "lstsq" (discretized)
        tolerance: Relative tolerance on each of the first 2k moments

    Returns:
        AtomicMeasure whose atom at -gamma' has weight rho_k(-gamma')

    Raises:
        ParameterError: For k = 0 or |gamma'| > eta * k^(-3/2)
        NegativeWeight: If a node weight is negative
        MomentMatchFailure: If the moments deviate beyond tolerance
    """
    k = params.k
    if k < 1:
        raise ParameterError("construct_q needs k >= 1 (2k >= 2 moments to match)")
    if params.gamma_prime > params.eta * k**-1.5 * (1 + 1e-12):
        raise ParameterError("|-gamma'| exceeds eta * k^(-3/2)")
    basis = basis or ortho_basis(params.eta, k)
    x0 = -to_mpf(params.gamma_prime)
    fixed_weight = rho(basis, x0)

    nodes, weights = None, None
    if method == "kernel":
        try:
            nodes = _kernel_nodes(basis, x0)
            weights = [rho(basis, y) for y in nodes]
        except ArithmeticError as e:
            _logger.warning("Kernel roots degenerate (%s), using discretized fallback", e)
    elif method != "lstsq":
        raise ValueError(f"Unknown construction method: {method}")
    if nodes is None:
        nodes, weights = _discretized_rule(basis, x0, fixed_weight)

    for w in weights:
        if w < 0:
            raise NegativeWeight(
                f"Node weight {mpmath.nstr(w, 8)} is negative; parameters outside validity"
            )
    q = AtomicMeasure((x0, *nodes), (fixed_weight, *weights))

    target = moments_p(basis.eta, 2 * k)
    for j, expected in enumerate(target):
        deviation = abs(q.moment(j) - expected) / abs(expected)
        if deviation > tolerance:
            raise MomentMatchFailure(
                f"Moment {j} deviates by {mpmath.nstr(deviation, 6)} (relative)"
            )
    return q


@extended_precision
def rescale_and_condition(
    p: MixtureP,
    q: AtomicMeasure,
    params: ConstructionParams,
    interval: Tuple[float, float] = (-0.5, 0.5),
    tail_slack: float = 10.0,
) -> Tuple[HybridMeasure, AtomicMeasure]:
    """Map x -> (x + gamma'/2)/(8k + 1) and condition both measures on ``interval``.

    The atom at 0 of P lands on gamma~ and the atom at -gamma' of Q on -gamma~.

    Raises:
        ConditioningMassLoss: If either measure loses more than
            ``tail_slack`` times the tail bound (4t)^(-2k) at t = 1/2
    """
    scale = mpf(1) / params.denominator
    shift = to_mpf(params.gamma_prime) / (2 * params.denominator)
    p_image = p.as_measure().affine(scale, shift)
    q_image = q.affine(scale, shift)
    p_prime = p_image.condition(*interval)
    q_prime = q_image.condition(*interval)

    limit = tail_slack * float(tail_bound(params.k, 0.5))
    for name, measure in (("P'", p_prime), ("Q'", q_prime)):
        if measure.conditioned_mass > limit:
            raise ConditioningMassLoss(
                f"Conditioning {name} removed {measure.conditioned_mass:.3e}, "
                f"limit {limit:.3e}"
            )
    _logger.debug(
        "Conditioned away P: %.3e, Q: %.3e",
        p_prime.conditioned_mass,
        q_prime.conditioned_mass,
    )
    return p_prime, q_prime


@dataclass
class RescaleAudit:
    """Measured constants of the rescaled pair (P', Q')."""

    atom_mass_p: float
    atom_mass_q: float
    rho_at_node: float
    measured_c_atom: float
    measured_c_rho: float
    moment_gaps: List[float] = field(default_factory=list)
    low_degree_gap: float = 0.0
    measured_c_decay: float = math.inf
    high_degree_ok: bool = True
    base_tv: float = 0.0

    def as_dict(self) -> Dict[str, object]:
        return dict(self.__dict__)


@extended_precision
def audit_rescaled(
    p_prime: HybridMeasure,
    q_prime: AtomicMeasure,
    params: ConstructionParams,
    basis: Optional[OrthoBasis] = None,
    max_degree: Optional[int] = None,
) -> RescaleAudit:
    """Measure the constants C (atom masses ~ 1 - C eta) and c (gaps ~ e^{-ck}).

    Args:
        p_prime: Rescaled, conditioned P
        q_prime: Rescaled, conditioned Q
        params: Construction parameters
        basis: Basis used for rho_k(-gamma'); rebuilt when omitted
        max_degree: Highest moment compared (default 2k + 2)
    """
    k = params.k
    basis = basis or ortho_basis(params.eta, k)
    max_degree = max_degree or 2 * k + 2
    gamma_tilde = to_mpf(params.gamma_prime) / (16 * k + 2)

    atom_p = float(p_prime.weight_at(gamma_tilde))
    atom_q = float(q_prime.weight_at(-gamma_tilde))
    rho_value = float(rho(basis, -to_mpf(params.gamma_prime)))
    gaps = [
        float(abs(p_prime.moment(i) - q_prime.moment(i))) for i in range(1, max_degree + 1)
    ]
    low = max(gaps[:k])
    decay = -math.log(low / 2) / k if low > 0 else math.inf
    high_ok = all(gap <= 2.0 ** (-i + 1) for i, gap in enumerate(gaps, start=1) if i > k)

    return RescaleAudit(
        atom_mass_p=atom_p,
        atom_mass_q=atom_q,
        rho_at_node=rho_value,
        measured_c_atom=max(1 - atom_p, 1 - atom_q) / params.eta,
        measured_c_rho=(1 - rho_value) / params.eta,
        moment_gaps=gaps,
        low_degree_gap=low,
        measured_c_decay=decay,
        high_degree_ok=high_ok,
        base_tv=float(base_tv(p_prime, q_prime.negate())),
    )
