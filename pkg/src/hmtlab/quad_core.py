"""Constants, graded radial grids, and singularity-aware quadrature.

Everything downstream integrates weighted radial profiles over a truncated
interval [r_min, 1-eps].  The integrands carry (-ln r)^k singularities at the
origin and (1-r^2)^(-k) singularities at the boundary, so the grid clusters
nodes geometrically at both ends and stays uniform in the interior where
profiles actually vary.  The boundary coordinate s = 1-r is stored exactly
(the grid is built in s on the right) so that 1-r^2 = s*(2-s) never suffers
cancellation, which matters for weights like (1-r^2)^(-n) at s ~ 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DomainError,
    GridConfigError,
    InvalidDimensionError,
    NumericError,
)

__all__ = [
    "Constants",
    "GridGrading",
    "RadialGrid",
    "make_constants",
    "make_grid",
    "grid_from_zones",
    "integrate",
    "cumulative_from_origin",
    "cumulative_to_boundary",
    "trapezoid_weights",
    "truncated_exp",
]

EXP_CLAMP = 700.0  # exp(700) ~ 1e304, last safe exponent in float64


@dataclass(frozen=True)
class Constants:
    """Dimension-dependent constants of the sharp inequalities on the ball.

    omega       surface area of the unit sphere S^(n-1) in R^n
    alpha_n     sharp exponential constant n * omega^(1/(n-1))
    hardy_const sharp boundary-Hardy constant (2(n-1)/n)^n
    """

    n: int
    omega: float
    alpha_n: float
    hardy_const: float

    @property
    def gamma(self) -> float:
        """Pole normalization omega^(-1/(n-1)) of the Green function."""
        return self.omega ** (-1.0 / (self.n - 1))


def make_constants(n: int) -> Constants:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    omega = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    alpha_n = n * omega ** (1.0 / (n - 1))
    hardy_const = (2.0 * (n - 1) / n) ** n
    return Constants(n=n, omega=omega, alpha_n=alpha_n, hardy_const=hardy_const)


@dataclass(frozen=True)
class GridGrading:
    """Clustering parameters of the three-zone radial mesh.

    A geometric tail runs from ``r_min`` up to ``inner_left``, a uniform
    section covers the interior, and a second geometric tail (in s = 1-r)
    runs from ``inner_right`` down to the truncation eps.  ``tail_fraction``
    of the nodes goes to each tail.  Spacing therefore decreases
    geometrically toward both endpoints; the ratio adapts to the node count
    (a fixed ratio underflows for large grids).
    """

    r_min: float = 1e-10
    inner_left: float = 0.01
    inner_right: float = 0.01
    tail_fraction: float = 0.15

    def validate(self) -> None:
        if not (0.0 < self.r_min < self.inner_left < 0.5):
            raise GridConfigError(
                f"need 0 < r_min < inner_left < 0.5, got r_min={self.r_min}, "
                f"inner_left={self.inner_left}"
            )
        if not (0.0 < self.inner_right < 0.5):
            raise GridConfigError(f"inner_right must lie in (0, 0.5), got {self.inner_right}")
        if not (0.0 < self.tail_fraction <= 0.4):
            raise GridConfigError(f"tail_fraction must lie in (0, 0.4], got {self.tail_fraction}")


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radial nodes on [r_min, 1-eps] with exact 1-r.

    nodes    radii r_i, nodes[0] = r_min, nodes[-1] = 1 - eps
    s        1 - r_i carried exactly (built before r on the right tail)
    xi       ln r_i, computed via log1p on the right tail
    """

    nodes: np.ndarray
    s: np.ndarray
    xi: np.ndarray
    epsilon: float
    grading: GridGrading

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        if self.nodes[0] <= 0.0 or np.any(np.diff(self.nodes) <= 0.0):
            raise GridConfigError("grid nodes must be strictly increasing and positive")

    @property
    def n_points(self) -> int:
        return self.nodes.size

    @property
    def one_minus_r2(self) -> np.ndarray:
        """(1 - r^2) evaluated as s*(2-s); exact to rounding near the boundary."""
        return self.s * (2.0 - self.s)

    def trapezoid_weights(self) -> np.ndarray:
        return trapezoid_weights(self.nodes)

    def refined(self) -> "RadialGrid":
        """Same span and grading with twice the node count."""
        return make_grid(2 * self.n_points, self.epsilon, self.grading)


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    dx = np.diff(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


def grid_from_zones(
    left: np.ndarray,
    mid: np.ndarray,
    s_right: np.ndarray,
    epsilon: float,
    grading: GridGrading,
) -> RadialGrid:
    """Assemble a grid from a left r-array, middle r-array, and right s-array."""
    nodes = np.concatenate([left, mid, 1.0 - s_right])
    s = np.concatenate([1.0 - left, 1.0 - mid, s_right])
    xi = np.concatenate([np.log(left), np.log(mid), np.log1p(-s_right)])
    return RadialGrid(nodes=nodes, s=s, xi=xi, epsilon=epsilon, grading=grading)


def make_grid(n_points: int, epsilon: float, grading: Optional[GridGrading] = None) -> RadialGrid:
    """Build the three-zone graded mesh on [r_min, 1-epsilon].

    Requires n_points >= 16 and 0 < epsilon < 1/2.  When epsilon is not
    small (epsilon >= inner_right) the boundary has no singular layer to
    resolve and the right tail collapses into the uniform section.
    """
    if not isinstance(n_points, (int, np.integer)) or n_points < 16:
        raise GridConfigError(f"n_points must be an integer >= 16, got {n_points!r}")
    if not (0.0 < epsilon < 0.5):
        raise GridConfigError(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    grading = grading or GridGrading()
    grading.validate()
    n_points = int(n_points)

    n_tail = max(4, int(round(n_points * grading.tail_fraction)))
    left = np.geomspace(grading.r_min, grading.inner_left, n_tail)

    if epsilon < grading.inner_right:
        s_right = np.geomspace(grading.inner_right, epsilon, n_tail)
        n_mid = n_points - 2 * n_tail
        if n_mid < 4:
            raise GridConfigError(
                f"n_points={n_points} too small for tail_fraction={grading.tail_fraction}"
            )
        mid = np.linspace(grading.inner_left, 1.0 - grading.inner_right, n_mid + 2)[1:-1]
    else:
        # boundary truncation is far from 1: uniform section runs straight to 1-eps
        s_right = np.asarray([epsilon])
        n_mid = n_points - n_tail - 1
        if n_mid < 4:
            raise GridConfigError(f"n_points={n_points} too small for the requested grading")
        mid = np.linspace(grading.inner_left, 1.0 - epsilon, n_mid + 2)[1:-1]

    return grid_from_zones(left, mid, s_right, epsilon, grading)


def integrate(samples: np.ndarray, grid: RadialGrid) -> float:
    """Composite trapezoid of node samples over [nodes[0], 1-eps].

    Exact for piecewise-linear integrands; second order on smooth ones.
    Linear and monotone in the samples.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != grid.nodes.shape:
        raise NumericError(
            f"samples shape {samples.shape} does not match grid ({grid.nodes.shape})"
        )
    if not np.all(np.isfinite(samples)):
        raise NumericError("non-finite sample passed to integrate")
    return float(np.dot(samples, grid.trapezoid_weights()))


def _cumtrapz(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    incr = 0.5 * (y[1:] + y[:-1]) * np.diff(x)
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(incr, out=out[1:])
    return out


def cumulative_from_origin(samples: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """F(r_i) = int_{r_0}^{r_i} samples dr by cumulative trapezoid."""
    samples = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(samples)):
        raise NumericError("non-finite sample in cumulative integral")
    return _cumtrapz(samples, grid.nodes)


def cumulative_to_boundary(samples_in_xi: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """F(r_i) = int_{xi_i}^{xi_max} samples dxi, accumulated from the boundary."""
    y = np.asarray(samples_in_xi, dtype=float)
    if not np.all(np.isfinite(y)):
        raise NumericError("non-finite sample in cumulative integral")
    incr = 0.5 * (y[1:] + y[:-1]) * np.diff(grid.xi)
    out = np.empty_like(y)
    out[-1] = 0.0
    out[:-1] = np.cumsum(incr[::-1])[::-1]
    return out


def truncated_exp(t, m: int):
    """Tail of the exponential series E_m(t) = sum_{k>=m} t^k / k!.

    Equals e^t minus the first m Taylor terms.  Small arguments (t < m/2)
    are summed as a series from the k = m term up, which avoids the
    catastrophic cancellation of the subtracted form; large arguments use
    the direct form with compensated summation of the Taylor partial sum.
    Monotone nondecreasing in t and strictly positive for t > 0.
    """
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise DomainError(f"truncation order must be an integer >= 0, got {m!r}")
    m = int(m)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if np.any(t_arr < 0.0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("truncated_exp requires finite t >= 0")

    out = np.zeros_like(t_arr)
    small = t_arr < (m / 2.0) if m > 0 else np.zeros(t_arr.shape, dtype=bool)

    if m > 0 and small.any():
        ts = t_arr[small]
        term = ts**m / math.factorial(m)
        total = term.copy()
        for k in range(m, m + 400):
            term = term * ts / (k + 1)
            total += term
            if np.all(term <= 1e-20 * total):
                break
        out[small] = total

    big = ~small
    if big.any():
        tb = t_arr[big]
        # Kahan-compensated partial Taylor sum of the subtracted terms
        partial = np.zeros_like(tb)
        comp = np.zeros_like(tb)
        term = np.ones_like(tb)
        for k in range(m):
            y = term - comp
            tmp = partial + y
            comp = (tmp - partial) - y
            partial = tmp
            term = term * tb / (k + 1)
        exp_t = np.where(tb <= EXP_CLAMP, np.exp(np.minimum(tb, EXP_CLAMP)), np.inf)
        out[big] = exp_t - partial

    return float(out[0]) if scalar else out
