"""Margin losses for halfspace learning and their certified constants.

phi_gamma(t) = (1 - t)^2 / 8 + { 1 - 2t/gamma        on [-1, 0]
                               { (t - gamma)^2/gamma^2 on [0, gamma]
                               { 0                    on [gamma, 1]

is 3/gamma-Lipschitz, 3/gamma^2-smooth and 1/4-strongly convex on [-1, 1],
with phi_gamma(t) <= 1/8 for t >= gamma and phi_gamma(t) >= 9/8 for t <= 0.
Losses act on unit-norm inputs; cube points are rescaled by 1/sqrt(D).
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Optional
import logging
import math

import numpy as np

from sqsep.cube import LabeledCloud
from sqsep.errors import CheckFailed, ParameterError


_logger = logging.getLogger("sqsep.console")

KINDS = ("hinge", "phi", "scaled_phi", "squared")
PHI_AT_ZERO = 9.0 / 8.0
PHI_OPTIMUM_BOUND = 1.0 / 8.0


def hinge_loss(w: np.ndarray, X: np.ndarray, y: np.ndarray, gamma: float) -> np.ndarray:
    """max(0, gamma - y <w, x>), per point."""
    margins = np.asarray(y, dtype=float) * (np.asarray(X, dtype=float) @ np.asarray(w, dtype=float))
    return np.maximum(0.0, gamma - margins)


def phi_gamma(t, gamma: float):
    t = np.asarray(t, dtype=float)
    extra = np.where(
        t <= 0,
        1.0 - 2.0 * t / gamma,
        np.where(t <= gamma, (t - gamma) ** 2 / gamma**2, 0.0),
    )
    return (1.0 - t) ** 2 / 8.0 + extra


def phi_gamma_derivative(t, gamma: float):
    t = np.asarray(t, dtype=float)
    extra = np.where(t <= 0, -2.0 / gamma, np.where(t <= gamma, 2.0 * (t - gamma) / gamma**2, 0.0))
    return -(1.0 - t) / 4.0 + extra


@dataclass(frozen=True)
class LossSpec:
    """A margin loss t -> loss(t) with its reported constants.

    Attributes:
        kind: One of "hinge", "phi", "scaled_phi" or "squared"
        gamma: Margin parameter (unused by "squared")
        theta: Multiplier of "scaled_phi"
    """

    kind: str
    gamma: float = 0.1
    theta: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"Unknown loss kind '{self.kind}', expected one of {KINDS}")
        if self.kind != "squared" and not 0 < self.gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.theta <= 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")

    @property
    def scale(self) -> float:
        return self.theta if self.kind == "scaled_phi" else 1.0

    @property
    def lipschitz(self) -> float:
        if self.kind == "hinge":
            return 1.0
        if self.kind == "squared":
            return 2.0
        return 3.0 * self.scale / self.gamma

    @property
    def smooth(self) -> float:
        if self.kind == "hinge":
            return math.inf
        if self.kind == "squared":
            return 1.0
        return 3.0 * self.scale / self.gamma**2

    @property
    def strongly_convex(self) -> float:
        if self.kind == "hinge":
            return 0.0
        if self.kind == "squared":
            return 1.0
        return self.scale / 4.0

    @property
    def alpha(self) -> float:
        """Suboptimality that still certifies error at most 1/4."""
        if self.kind in ("phi", "scaled_phi"):
            return self.scale * PHI_OPTIMUM_BOUND
        return self.gamma / 3.0 if self.kind == "hinge" else math.nan

    @property
    def max_value(self) -> float:
        """Largest loss value on [-1, 1]."""
        if self.kind == "hinge":
            return 1.0 + self.gamma
        if self.kind == "squared":
            return 2.0
        return self.scale * float(phi_gamma(-1.0, self.gamma))

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "hinge":
            return np.maximum(0.0, self.gamma - t)
        if self.kind == "squared":
            return (1.0 - t) ** 2 / 2.0
        return self.scale * phi_gamma(t, self.gamma)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "hinge":
            return np.where(t < self.gamma, -1.0, 0.0)
        if self.kind == "squared":
            return -(1.0 - t)
        return self.scale * phi_gamma_derivative(t, self.gamma)

    def expected(self, w: np.ndarray, cloud: LabeledCloud) -> float:
        """l(w; P) = E[loss(y <w, x>)] over unit-normalized points."""
        t = cloud.y * (unit_rows(cloud.X) @ np.asarray(w, dtype=float))
        return float(cloud.probs @ self.value(t))

    def as_dict(self) -> Dict[str, float]:
        return {
            "kind": self.kind,
            "gamma": self.gamma,
            "theta": self.theta,
            "lipschitz": self.lipschitz,
            "smooth": self.smooth,
            "strongly_convex": self.strongly_convex,
            "alpha": self.alpha,
        }


def unit_rows(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    lengths = np.linalg.norm(X, axis=1, keepdims=True)
    return np.divide(X, lengths, out=np.zeros_like(X), where=lengths > 0)


def scaled_loss_for(lipschitz: float, smooth: float, mu: float, alpha: float, d: int) -> LossSpec:
    """theta * phi_gamma meeting the given constants up to factors 3, 3 and 1/4.

    theta = max(mu, alpha) and
    gamma = max(theta / L, sqrt(theta / sigma), d^(-1 / (2 + 2/5))).

    Raises:
        ParameterError: If max(mu, alpha) exceeds min(L, sigma)
    """
    theta = max(mu, alpha)
    if theta <= 0 or theta > min(lipschitz, smooth):
        raise ParameterError(
            f"Need 0 < max(mu, alpha) <= min(L, sigma), got {theta} against"
            f" L={lipschitz}, sigma={smooth}"
        )
    gamma = max(theta / lipschitz, math.sqrt(theta / smooth), d ** (-1.0 / 2.4))
    return LossSpec("scaled_phi", gamma=gamma, theta=theta)


@dataclass(frozen=True)
class LossGridReport:
    """Finite-difference constants of a loss on a uniform grid of [-1, 1]."""

    lipschitz: float
    min_curvature: float
    max_curvature: float
    points: int

    def as_dict(self) -> Dict[str, float]:
        return {
            "lipschitz": self.lipschitz,
            "min_curvature": self.min_curvature,
            "max_curvature": self.max_curvature,
            "points": self.points,
        }


def loss_grid_check(spec: LossSpec, points: int = 1000, slack: float = 1e-6) -> LossGridReport:
    """Check the Lipschitz, smoothness and strong convexity constants on a grid.

    Second differences are taken on cells that do not straddle a breakpoint
    of the piecewise definition.

    Raises:
        CheckFailed: If a measured constant falls outside its reported bound
    """
    grid = np.linspace(-1.0, 1.0, points)
    step = grid[1] - grid[0]
    values = spec.value(grid)
    slopes = np.abs(np.diff(values)) / step
    curvature = (values[2:] - 2 * values[1:-1] + values[:-2]) / step**2
    breakpoints = (0.0, spec.gamma) if spec.kind != "squared" else ()
    smooth_cells = np.ones(points - 2, dtype=bool)
    for point in breakpoints:
        smooth_cells &= np.abs(grid[1:-1] - point) > step
    report = LossGridReport(
        float(slopes.max()),
        float(curvature[smooth_cells].min()),
        float(curvature[smooth_cells].max()),
        points,
    )
    if report.lipschitz > spec.lipschitz * (1 + slack):
        raise CheckFailed(f"Lipschitz constant {report.lipschitz:.6g} above {spec.lipschitz:.6g}")
    if report.min_curvature < spec.strongly_convex * (1 - slack) - slack:
        raise CheckFailed(
            f"Curvature {report.min_curvature:.6g} below {spec.strongly_convex:.6g}"
        )
    if report.max_curvature > spec.smooth * (1 + slack):
        raise CheckFailed(f"Curvature {report.max_curvature:.6g} above {spec.smooth:.6g}")
    return report


@dataclass(frozen=True)
class BridgeReport:
    """Error and phi_gamma loss of a hypothesis, with the separator loss."""

    err: float
    loss: float
    best_separator_loss: Optional[float] = None

    @property
    def error_bound(self) -> float:
        return self.loss / PHI_AT_ZERO

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {
            "err": self.err,
            "loss": self.loss,
            "error_bound": self.error_bound,
            "best_separator_loss": self.best_separator_loss,
        }


def err_loss_bridge(
    w: np.ndarray,
    cloud: LabeledCloud,
    gamma: float,
    separators: Iterable[np.ndarray] = (),
) -> BridgeReport:
    """Relate the 0-1 error of w to its phi_gamma loss.

    Points are normalized to the unit sphere. The error is at most
    loss / (9/8), and every unit vector separating the points with margin
    gamma has loss at most 1/8.

    Raises:
        CheckFailed: If either relation fails
    """
    spec = LossSpec("phi", gamma=gamma)
    X = unit_rows(cloud.X)
    w = np.asarray(w, dtype=float)
    err = float(cloud.probs @ (np.where(X @ w >= 0, 1, -1) != cloud.y))
    loss = spec.expected(w, cloud)
    if err > loss / PHI_AT_ZERO + 1e-12:
        raise CheckFailed(f"Error {err:.6g} exceeds loss / (9/8) = {loss / PHI_AT_ZERO:.6g}")

    best = None
    for separator in separators:
        separator = np.asarray(separator, dtype=float)
        separator = separator / np.linalg.norm(separator)
        if np.min(cloud.y * (X @ separator)) < gamma - 1e-12:
            continue
        value = spec.expected(separator, cloud)
        if value > PHI_OPTIMUM_BOUND + 1e-12:
            raise CheckFailed(f"A margin-{gamma:g} separator has loss {value:.6g} above 1/8")
        best = value if best is None else min(best, value)
    return BridgeReport(err, loss, best)


@dataclass(frozen=True)
class HingeReport:
    hinge: float
    err: float

    def bound(self, gamma: float) -> float:
        return self.hinge / gamma


def hinge_error_bound(w: np.ndarray, cloud: LabeledCloud, gamma: float) -> HingeReport:
    """Average hinge loss and error of w; a hinge loss of gamma/3 forces error <= 1/3.

    Every misclassified point costs at least gamma, so err <= hinge / gamma.

    Raises:
        CheckFailed: If err exceeds hinge / gamma
    """
    X = unit_rows(cloud.X)
    w = np.asarray(w, dtype=float)
    hinge = float(cloud.probs @ hinge_loss(w, X, cloud.y, gamma))
    err = float(cloud.probs @ (np.where(X @ w >= 0, 1, -1) != cloud.y))
    report = HingeReport(hinge, err)
    if err > report.bound(gamma) + 1e-12:
        raise CheckFailed(f"Error {err:.6g} above hinge / gamma = {report.bound(gamma):.6g}")
    _logger.debug("Hinge %.6g, error %.6g at gamma=%g", hinge, err, gamma)
    return report
