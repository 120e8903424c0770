"""Green function of the n-Laplacian with critical Hardy potential.

The radial problem reduces to a flux identity: for the positive singular
solution G with pole at the origin,

    -omega^(1/(n-1)) G'(b) b = (1 + m(b))^(1/(n-1)),
    m(b) = omega * int_0^b V(s) G(s)^(n-1) s^(n-1) ds,

with G = 0 at the truncated boundary 1-eps.  The solver iterates this map
(damped Picard) in the log coordinate xi = ln r, where the potential-free
part of the flux integrates exactly.  The pole decomposition

    G(r) = -gamma ln r + C_G + H(r),   gamma = omega^(-1/(n-1)),

is assembled without cancellation: the log part is exact in xi and the
remainder H is accumulated from the origin as a sum of tiny positive flux
excesses, so H stays meaningful down to 1e-300.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ConvergenceError,
    CorruptTableError,
    ExtractionUnstableError,
    PotentialInstabilityError,
)
from .functionals import Potential
from .quad_core import (
    GridGrading,
    RadialGrid,
    cumulative_from_origin,
    grid_from_zones,
    make_constants,
)

__all__ = [
    "GreenTable",
    "TransplantMaps",
    "solve_green",
    "solve_green_continued",
    "extrapolate_c_g",
    "extract_c_g",
    "check_boundary_bound",
    "make_maps",
    "make_t_grid",
    "comparison_supersolution",
]

INSTABILITY_CAP = 1e12  # sup m beyond this across iterations means no spectral gap


@dataclass(frozen=True)
class GreenTable:
    """Converged discrete Green function and its pole decomposition."""

    grid: RadialGrid
    n: int
    potential: Potential
    g_values: np.ndarray
    g_deriv: np.ndarray
    m_values: np.ndarray
    flux: np.ndarray
    c_g: float
    remainder: np.ndarray
    residual: float
    epsilon_used: float
    iterations: int
    tol: float

    def validate(self) -> None:
        """Raise CorruptTableError if any structural invariant fails."""
        c = make_constants(self.n)
        if np.any(np.diff(self.g_values) >= 0.0):
            raise CorruptTableError("G must be strictly decreasing")
        if np.any(self.g_deriv >= 0.0):
            raise CorruptTableError("G' must be negative at all nodes")
        flux_from_deriv = -(c.omega ** (1.0 / (self.n - 1))) * self.g_deriv * self.grid.nodes
        if np.any(flux_from_deriv < 1.0 - 1e-12):
            raise CorruptTableError("-omega^(1/(n-1)) G' r must be >= 1")
        if not math.isfinite(self.residual) or self.residual > 10.0 * self.tol:
            raise CorruptTableError(f"residual {self.residual} exceeds tolerance {self.tol}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "potential": self.potential.descriptor(),
            "epsilon": self.epsilon_used,
            "c_g": self.c_g,
            "residual": self.residual,
            "tol": self.tol,
            "iterations": self.iterations,
            "r": self.grid.nodes.tolist(),
            "G": self.g_values.tolist(),
            "Gprime": self.g_deriv.tolist(),
            "remainder": self.remainder.tolist(),
        }


@dataclass(frozen=True)
class TransplantMaps:
    """Transplantation ingredients tabulated on a dedicated t-grid.

    a(t) inverts t = exp(-G/gamma); phi(t) = omega |G'(a)|^(n-1) a^(n-1) - 1
    equals the cumulative potential mass m(a(t)); psi(t) is the singular-MT
    comparison weight (a/t)^(n-beta) / (1 + phi)^(1/(n-1)).
    """

    t_grid: RadialGrid
    a: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    psi: np.ndarray
    beta: float
    n: int
    c_g: float
    potential: Potential
    # phi'(t) (-ln t)^(1-n) with the log powers cancelled analytically:
    # V(a) a^n / (t (1+phi)^(1/(n-1))), finite at every node
    hardy_weight: np.ndarray = None

    @property
    def t(self) -> np.ndarray:
        return self.t_grid.nodes

    @property
    def a_over_t(self) -> np.ndarray:
        return self.a / self.t_grid.nodes


def _flux_excess(m: np.ndarray, n: int) -> np.ndarray:
    # (1+m)^(1/(n-1)) - 1 without rounding to zero for m below 1 ulp
    return np.expm1(np.log1p(m) / (n - 1))


def _flux_of(m: np.ndarray, n: int) -> np.ndarray:
    return 1.0 + _flux_excess(m, n)


def solve_green(
    n: int,
    potential: Potential,
    grid: RadialGrid,
    tol: float = 1e-8,
    max_iter: int = 500,
    damping: float = 0.5,
    initial: Optional[np.ndarray] = None,
) -> GreenTable:
    """Damped fixed-point solve of the flux identity on the truncated ball.

    The residual is the sup-norm defect of the flux identity evaluated on
    the returned table (potential mass recomputed from the returned G).
    Raises ConvergenceError if tol is not reached within max_iter and
    PotentialInstabilityError when the potential mass diverges across
    iterations (no spectral gap).
    """
    if tol <= 0.0:
        raise ConvergenceError("tolerance must be positive", residual=None, iterations=0)
    c = make_constants(n)
    gamma = c.gamma
    r, xi = grid.nodes, grid.xi
    v_vals = potential.values(grid, n)
    log_part = gamma * (xi[-1] - xi)

    def m_of(g_vals: np.ndarray) -> np.ndarray:
        return cumulative_from_origin(c.omega * v_vals * g_vals ** (n - 1) * r ** (n - 1), grid)

    def remainder_from(excess: np.ndarray) -> np.ndarray:
        # H(r) = -gamma int_{xi_min}^{xi} (flux - 1) dxi'; tiny positive increments
        incr = 0.5 * gamma * (excess[1:] + excess[:-1]) * np.diff(xi)
        out = np.empty_like(excess)
        out[0] = 0.0
        np.cumsum(incr, out=out[1:])
        return -out

    def assemble(excess: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        # G(r) = gamma(xi_max - xi) + int_xi^{xi_max} gamma(flux-1) dxi
        #      = log part + (H(r) - H(r_max)); both pieces cancellation-free
        h_rem = remainder_from(excess)
        g_vals = log_part + (h_rem - h_rem[-1])
        return g_vals, h_rem

    g_cur = log_part.copy() if initial is None else np.asarray(initial, dtype=float).copy()
    m_cur = m_of(g_cur)
    residual = math.inf
    iterations = 0
    for k in range(max_iter):
        iterations = k + 1
        excess_used = _flux_excess(m_cur, n)
        g_new, _ = assemble(excess_used)
        m_new = m_of(g_new)
        m_sup = float(np.max(m_new))
        if not math.isfinite(m_sup) or m_sup > INSTABILITY_CAP:
            raise PotentialInstabilityError(
                f"potential mass diverged (sup m = {m_sup:.3e} after {iterations} iterations); "
                "potential has no spectral gap on this domain"
            )
        residual = float(np.max(np.abs(_flux_excess(m_new, n) - excess_used)))
        if residual <= tol:
            g_cur, m_cur = g_new, m_new
            break
        g_cur = damping * g_new + (1.0 - damping) * g_cur
        m_cur = m_of(g_cur)
    else:
        raise ConvergenceError(
            f"no convergence in {max_iter} iterations (residual {residual:.3e} > tol {tol:.3e})",
            residual=residual,
            iterations=max_iter,
        )

    # final self-consistent assembly from the converged mass
    excess_fin = _flux_excess(m_of(g_cur), n)
    g_fin, h_rem = assemble(excess_fin)
    m_fin = m_of(g_fin)
    residual = float(np.max(np.abs(_flux_excess(m_fin, n) - excess_fin)))
    flux_fin = 1.0 + excess_fin
    g_deriv = -gamma * flux_fin / r
    c_g = _fit_c_g(grid, g_fin, gamma, n)
    table = GreenTable(
        grid=grid,
        n=n,
        potential=potential,
        g_values=g_fin,
        g_deriv=g_deriv,
        m_values=m_fin,
        flux=flux_fin,
        c_g=c_g,
        remainder=h_rem,
        residual=residual,
        epsilon_used=grid.epsilon,
        iterations=iterations,
        tol=tol,
    )
    table.validate()
    return table


def solve_green_continued(
    n: int,
    potential: Potential,
    n_points: int,
    eps_schedule: Sequence[float],
    grading: Optional[GridGrading] = None,
    **solve_kw,
) -> List[GreenTable]:
    """Chain of solves with shrinking boundary truncation, each warm-started.

    Mirrors the construction of G as a limit of Dirichlet problems on
    growing balls; the previous solution (interpolated in ln r) seeds the
    next, which keeps the iteration count flat as eps shrinks.
    """
    from .quad_core import make_grid

    tables: List[GreenTable] = []
    prev: Optional[GreenTable] = None
    for eps in eps_schedule:
        grid = make_grid(n_points, eps, grading)
        initial = None
        if prev is not None:
            initial = np.interp(grid.xi, prev.grid.xi, prev.g_values)
            initial = np.maximum(initial - initial[-1], 0.0)
        tables.append(solve_green(n, potential, grid, initial=initial, **solve_kw))
        prev = tables[-1]
    return tables


def extrapolate_c_g(eps_values: Sequence[float], c_g_values: Sequence[float]) -> Dict[str, float]:
    """Extrapolate the pole constant over a truncation schedule.

    The truncated-domain constants approach their limit with a slow
    logarithmic tail; fitting c_g(eps) = c - a / ln(1/eps) captures it well
    over decade schedules (a plain power law in eps does not).
    """
    eps_arr = np.asarray(eps_values, dtype=float)
    cg_arr = np.asarray(c_g_values, dtype=float)
    if eps_arr.size < 2:
        raise ExtractionUnstableError("need at least two truncation levels to extrapolate")
    x = 1.0 / np.log(1.0 / eps_arr)
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, cg_arr, rcond=None)
    return {"limit": float(coef[0]), "slope": float(coef[1])}


def _fit_c_g(grid: RadialGrid, g_values: np.ndarray, gamma: float, n: int, k: int = 8) -> float:
    y = g_values[:k] + gamma * np.log(grid.nodes[:k])
    z = grid.nodes[:k] ** n * (-np.log(grid.nodes[:k])) ** (n - 1)
    design = np.vstack([np.ones_like(z), z]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coef[0])


def extract_c_g(table: GreenTable, k: int = 8) -> float:
    """Pole constant from the k smallest nodes, extrapolated in r^n (-ln r)^(n-1).

    The sequence G + gamma ln r must be monotone over the extraction nodes
    (it equals c_g + H with H monotone); jitter beyond rounding scale means
    the table is not usable for extraction.
    """
    c = make_constants(table.n)
    y = table.g_values[:k] + c.gamma * np.log(table.grid.nodes[:k])
    scale = max(1.0, float(np.max(np.abs(y))))
    diffs = np.diff(y)
    if np.any(diffs > 1e-9 * scale) and np.any(diffs < -1e-9 * scale):
        raise ExtractionUnstableError(
            "G + gamma ln r is not monotone over the extraction nodes"
        )
    return _fit_c_g(table.grid, table.g_values, c.gamma, table.n, k=k)


def check_boundary_bound(table: GreenTable) -> float:
    """Fitted constant in G <= C (1-r^2)^((n-1)/n) over r >= 1/2."""
    g = table.grid
    mask = g.nodes >= 0.5
    ratios = table.g_values[mask] / g.one_minus_r2[mask] ** ((table.n - 1.0) / table.n)
    return float(np.max(ratios))


def make_t_grid(
    n_t: int = 4096,
    t_min: float = 1e-8,
    inner: float = 0.01,
    tail_fraction: float = 0.2,
) -> RadialGrid:
    """Dedicated grid in the transplanted variable t = exp(-G/gamma).

    Same three-zone layout as the radial grid: the map compresses the pole
    region (handled by the log tail at 0) and the bulk of every transplanted
    profile lives in the uniform middle.
    """
    grading = GridGrading(r_min=t_min, inner_left=inner, inner_right=inner,
                          tail_fraction=tail_fraction)
    n_tail = max(4, int(round(n_t * tail_fraction)))
    left = np.geomspace(t_min, inner, n_tail)
    s_right = np.geomspace(inner, t_min, n_tail)
    mid = np.linspace(inner, 1.0 - inner, n_t - 2 * n_tail + 2)[1:-1]
    return grid_from_zones(left, mid, s_right, epsilon=t_min, grading=grading)


def image_t_grid(table: GreenTable) -> RadialGrid:
    """The r-grid pushed through t = exp(-G/gamma).

    On this grid a(t_i) = r_i exactly, so the transplantation of a profile
    is its own node data; the V = 0 verification path uses it to make the
    identity transplantation exact to rounding.  1 - t is computed with
    expm1, exact near the boundary where t -> 1.
    """
    c = make_constants(table.n)
    arg = -table.g_values / c.gamma
    t = np.exp(arg)
    s_t = -np.expm1(arg)
    return RadialGrid(nodes=t, s=s_t, xi=arg, epsilon=float(s_t[-1]),
                      grading=table.grid.grading)


def make_maps(
    table: GreenTable,
    beta: float = 0.0,
    n_t: int = 4096,
    t_min: float = 1e-8,
    t_grid: Optional[RadialGrid] = None,
) -> TransplantMaps:
    """Tabulate a(t), phi, phi', psi on a logarithmic t-grid.

    a(t) is the monotone interpolant (in ln-ln coordinates) of the inverse
    of t = exp(-G/gamma); phi comes from the identity phi = m(a(t)); phi'
    uses the closed differentiation formula rather than differencing phi.
    An explicit ``t_grid`` (e.g. from image_t_grid) overrides the default
    construction.
    """
    c = make_constants(table.n)
    n = table.n
    if np.any(np.diff(table.g_values) >= 0.0):
        raise CorruptTableError("cannot invert a non-monotone Green table")
    if t_grid is None:
        t_grid = make_t_grid(n_t=n_t, t_min=t_min)
    t = t_grid.nodes
    neg_ln_t = -t_grid.xi  # exact -ln t, log1p-built near t = 1
    ln_t_nodes = -table.g_values / c.gamma  # increasing, ends at 0
    ln_r = table.grid.xi
    ln_t_query = np.clip(-neg_ln_t, ln_t_nodes[0], ln_t_nodes[-1])
    a = np.exp(PchipInterpolator(ln_t_nodes, ln_r)(ln_t_query))
    a = np.clip(a, table.grid.nodes[0], table.grid.nodes[-1])

    ln_a = np.log(a)
    phi = PchipInterpolator(ln_r, table.m_values)(ln_a)
    phi = np.maximum(phi, 0.0)

    # potential at a(t); the boundary weight needs 1 - a^2 without cancellation
    ln_one_minus_a2 = PchipInterpolator(ln_r, np.log(table.grid.one_minus_r2))(ln_a)
    v_at_a = _potential_at(table.potential, a, np.exp(ln_one_minus_a2), n)
    hardy_weight = v_at_a * a**n / (t * (1.0 + phi) ** (1.0 / (n - 1)))
    phi_prime = hardy_weight * neg_ln_t ** (n - 1)
    psi = (a / t) ** (n - beta) / (1.0 + phi) ** (1.0 / (n - 1))

    maps = TransplantMaps(
        t_grid=t_grid, a=a, phi=phi, phi_prime=phi_prime, psi=psi,
        beta=beta, n=n, c_g=table.c_g, potential=table.potential,
        hardy_weight=hardy_weight,
    )
    _validate_maps(maps, table)
    return maps


def _potential_at(potential: Potential, a: np.ndarray, one_minus_a2: np.ndarray, n: int) -> np.ndarray:
    hc = make_constants(n).hardy_const
    if potential.kind == "zero":
        return np.zeros_like(a)
    if potential.kind == "hardy":
        return hc / one_minus_a2**n
    if potential.kind == "hardy+lambda":
        return hc / one_minus_a2**n + potential.lam
    if potential.kind == "const":
        return np.full_like(a, potential.alpha)
    return np.interp(a, potential.table_r, potential.table_v)


def _validate_maps(maps: TransplantMaps, table: GreenTable) -> None:
    if np.any(np.diff(maps.a) <= 0.0):
        raise CorruptTableError("a(t) is not strictly increasing")
    ratio = maps.a_over_t
    if np.any(np.diff(ratio) > 1e-9 * ratio[:-1]):
        raise CorruptTableError("a(t)/t is not decreasing")
    if not table.potential.is_zero():
        # below the first radial node the cumulative potential mass is not
        # observable, so phi may sit at exactly zero there
        observable = maps.a > table.grid.nodes[0] * (1.0 + 1e-12)
        if np.any(maps.phi[observable] <= 0.0) or np.any(maps.phi < 0.0):
            raise CorruptTableError("phi must be positive for a nonzero potential")


def comparison_supersolution(grid: RadialGrid, n: int, s_safe: float = 0.011) -> Dict[str, float]:
    """Supersolution check for psi(r) = (-ln r)^((n-1)/n) against the critical potential.

    Returns the minimum of the elementary inequality (1-r^2) + 2 r ln r >= 0
    over all nodes, the minimum of the analytic residual
    -Delta_n psi - V psi^(n-1) at the nodes, and the minimum of a
    finite-volume discretization of it over interior nodes with
    1 - r >= s_safe.  The analytic margin decays like n(1-r)/2 relative to
    its terms, so within the geometrically graded boundary tail it drops
    below what any difference scheme resolves; the default safe range stops
    at the uniform zone.
    """
    c = make_constants(n)
    r = grid.nodes
    neg_ln_r = -grid.xi  # exact -ln r, log1p-built near the boundary
    one_minus_r2 = grid.one_minus_r2
    elementary = one_minus_r2 - 2.0 * r * neg_ln_r

    q = (n - 1.0) / n
    psi_vals = neg_ln_r**q
    v_vals = c.hardy_const / one_minus_r2**n
    analytic = (
        ((n - 1.0) / n) ** n
        * psi_vals ** (n - 1)
        / r**n
        * (neg_ln_r ** (-float(n)) - (2.0 * r / one_minus_r2) ** n)
    )

    # finite-volume radial n-Laplacian: flux difference over the exact
    # cell volume, consistent on arbitrarily graded meshes
    mid_r = 0.5 * (r[1:] + r[:-1])
    dpsi = np.diff(psi_vals) / np.diff(r)
    flux_mid = mid_r ** (n - 1) * np.abs(dpsi) ** (n - 2) * dpsi
    cell = (mid_r[1:] ** n - mid_r[:-1] ** n) / n
    lap = np.diff(flux_mid) / cell
    discrete = -lap - v_vals[1:-1] * psi_vals[1:-1] ** (n - 1)
    interior = grid.s[1:-1] >= s_safe
    return {
        "elementary_min": float(np.min(elementary)),
        "analytic_min": float(np.min(analytic)),
        "discrete_min": float(np.min(discrete[interior])),
        "discrete_range_max_r": float(np.max(r[1:-1][interior])),
    }
