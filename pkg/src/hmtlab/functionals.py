"""Radial profiles and the functionals of the sharp-inequality pipeline.

A profile is a sampled radial function on a RadialGrid.  Derivatives come
from a shape-preserving (monotone) cubic interpolant rather than finite
differences: on strongly graded meshes central differences lose an order
near the endpoints, and the monotone fit never overshoots plateaus.

Admissible profiles are stored with u = 0 at the last node, enforced by
subtracting the boundary value; constant shifts leave the gradient energy
untouched and keep the profile in the zero-boundary class the theory needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, NamedTuple, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NumericError, PreconditionError
from .quad_core import (
    EXP_CLAMP,
    RadialGrid,
    integrate,
    make_constants,
    trapezoid_weights,
    truncated_exp,
)

__all__ = [
    "RadialProfile",
    "Potential",
    "FunctionalReport",
    "MTResult",
    "HyperbolicMTResult",
    "PolyaSzegoResult",
    "grad_energy",
    "hardy_term",
    "hardy_tail_share",
    "h_functional",
    "q_v_functional",
    "ln_norm_pow",
    "hyperbolic_ln_norm_pow",
    "singular_mt",
    "hyperbolic_mt",
    "hyperbolic_volume",
    "cell_hyperbolic_volumes",
    "rearrange",
    "check_polya_szego",
    "check_hardy_littlewood",
    "check_boundary_decay",
    "functional_report",
]

TAIL_SHARE_THRESHOLD = 0.5  # divergent-tail detector: last decade carries > 50%


class RadialProfile:
    """Sampled radial function u(r) >= 0 on a RadialGrid.

    ``enforce_zero_boundary`` subtracts u at the last node (default), which
    is what every admissible profile uses; pass False for diagnostic
    profiles that legitimately carry boundary values.
    """

    def __init__(self, grid: RadialGrid, values, *, enforce_zero_boundary: bool = True):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.nodes.shape:
            raise PreconditionError(
                f"values shape {values.shape} does not match grid ({grid.nodes.shape})"
            )
        if not np.all(np.isfinite(values)):
            raise NumericError("profile values must be finite")
        if enforce_zero_boundary:
            values = np.maximum(values - values[-1], 0.0)
        self.grid = grid
        self.values = values
        self._interp: Optional[PchipInterpolator] = None
        self._deriv: Optional[np.ndarray] = None

    @classmethod
    def from_function(cls, grid: RadialGrid, f: Callable[[np.ndarray], np.ndarray], **kw):
        return cls(grid, np.asarray(f(grid.nodes), dtype=float), **kw)

    @property
    def interpolator(self) -> PchipInterpolator:
        if self._interp is None:
            self._interp = PchipInterpolator(self.grid.nodes, self.values)
        return self._interp

    @property
    def derivative(self) -> np.ndarray:
        """u'(r_i) read from the monotone cubic fit (cached)."""
        if self._deriv is None:
            self._deriv = self.interpolator.derivative()(self.grid.nodes)
        return self._deriv

    def __call__(self, r) -> np.ndarray:
        r = np.clip(np.asarray(r, dtype=float), self.grid.nodes[0], self.grid.nodes[-1])
        return self.interpolator(r)

    def is_nonincreasing(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.values) <= tol * max(1.0, float(self.values.max(initial=0.0)))))

    def scaled(self, c: float) -> "RadialProfile":
        return RadialProfile(self.grid, c * self.values, enforce_zero_boundary=False)

    def with_values(self, values, **kw) -> "RadialProfile":
        return RadialProfile(self.grid, values, **kw)


@dataclass(frozen=True)
class Potential:
    """Nonnegative radial potential V(r) with the rearrangement-compatible weight.

    kinds: zero, hardy (critical boundary potential), hardy+lambda,
    const, table.  Admissible kinds keep (1-r^2)^n V(r) non-increasing.
    """

    kind: str
    lam: float = 0.0
    alpha: float = 0.0
    table_r: Optional[np.ndarray] = None
    table_v: Optional[np.ndarray] = None

    @classmethod
    def zero(cls) -> "Potential":
        return cls(kind="zero")

    @classmethod
    def hardy_critical(cls) -> "Potential":
        return cls(kind="hardy")

    @classmethod
    def hardy_plus_lambda(cls, lam: float) -> "Potential":
        if lam < 0:
            raise DomainError(f"lambda must be >= 0, got {lam}")
        return cls(kind="hardy+lambda", lam=float(lam))

    @classmethod
    def constant(cls, alpha: float) -> "Potential":
        if alpha < 0:
            raise DomainError(f"constant potential must be >= 0, got {alpha}")
        return cls(kind="const", alpha=float(alpha))

    @classmethod
    def from_table(cls, r: np.ndarray, v: np.ndarray) -> "Potential":
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if np.any(v < 0):
            raise DomainError("tabulated potential must be nonnegative")
        return cls(kind="table", table_r=r, table_v=v)

    def values(self, grid: RadialGrid, n: int) -> np.ndarray:
        hc = make_constants(n).hardy_const
        if self.kind == "zero":
            return np.zeros_like(grid.nodes)
        if self.kind == "hardy":
            return hc / grid.one_minus_r2**n
        if self.kind == "hardy+lambda":
            return hc / grid.one_minus_r2**n + self.lam
        if self.kind == "const":
            return np.full_like(grid.nodes, self.alpha)
        if self.kind == "table":
            return np.interp(grid.nodes, self.table_r, self.table_v)
        raise DomainError(f"unknown potential kind {self.kind!r}")

    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "const" and self.alpha == 0.0)

    def weight_nonincreasing(self, grid: RadialGrid, n: int, tol: float = 1e-9) -> bool:
        """Check the admissibility condition: (1-r^2)^n V(r) non-increasing."""
        w = grid.one_minus_r2**n * self.values(grid, n)
        scale = max(1.0, float(np.max(w, initial=0.0)))
        return bool(np.all(np.diff(w) <= tol * scale))

    def descriptor(self) -> str:
        if self.kind == "hardy+lambda":
            return f"hardy+lambda={self.lam!r}"
        if self.kind == "const":
            return f"const={self.alpha!r}"
        return self.kind


class MTResult(NamedTuple):
    value: float
    overflow: bool


class HyperbolicMTResult(NamedTuple):
    value: float
    divergence_flag: bool
    overflow: bool


class PolyaSzegoResult(NamedTuple):
    margin: float
    h_margin: float


@dataclass
class FunctionalReport:
    """All functional values and inequality margins for one profile."""

    grad_energy: float
    hardy_term: float
    h_value: float
    mt_integral: float
    hyperbolic_mt: float
    beta: float
    truncation_m: int
    overflow: bool
    divergence_flag: bool
    margins: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "grad_energy": self.grad_energy,
            "hardy_term": self.hardy_term,
            "h_value": self.h_value,
            "mt_integral": self.mt_integral,
            "hyperbolic_mt": self.hyperbolic_mt,
            "beta": self.beta,
            "truncation_m": self.truncation_m,
            "overflow": self.overflow,
            "divergence_flag": self.divergence_flag,
            "margins": dict(self.margins),
        }


def grad_energy(u: RadialProfile, n: int) -> float:
    """omega * int |u'|^n r^(n-1) dr over the truncated domain."""
    c = make_constants(n)
    g = u.grid
    return c.omega * integrate(np.abs(u.derivative) ** n * g.nodes ** (n - 1), g)


def hardy_term(u: RadialProfile, n: int) -> float:
    """Sharp-constant boundary Hardy integral of |u|^n."""
    c = make_constants(n)
    g = u.grid
    integrand = u.values**n / g.one_minus_r2**n * g.nodes ** (n - 1)
    return c.hardy_const * c.omega * integrate(integrand, g)


def hardy_tail_share(u: RadialProfile, n: int) -> float:
    """Fraction of the Hardy integral carried by the last decade of nodes."""
    g = u.grid
    integrand = u.values**n / g.one_minus_r2**n * g.nodes ** (n - 1)
    return _tail_share(integrand, g)


def _tail_share(integrand: np.ndarray, grid: RadialGrid) -> float:
    w = trapezoid_weights(grid.nodes)
    total = float(np.dot(integrand, w))
    if total <= 0.0:
        return 0.0
    mask = grid.s <= 10.0 * grid.epsilon
    return float(np.dot(integrand[mask], w[mask])) / total


def h_functional(u: RadialProfile, n: int) -> float:
    """Hardy-deficit energy: gradient energy minus the sharp Hardy term."""
    return grad_energy(u, n) - hardy_term(u, n)


def q_v_functional(u: RadialProfile, potential: Potential, n: int) -> float:
    """Gradient energy minus int V |u|^n dx for a general admissible V."""
    c = make_constants(n)
    g = u.grid
    vpart = c.omega * integrate(
        potential.values(g, n) * u.values**n * g.nodes ** (n - 1), g
    )
    return grad_energy(u, n) - vpart


def ln_norm_pow(u: RadialProfile, n: int) -> float:
    """||u||_n^n with respect to Lebesgue measure on the ball."""
    c = make_constants(n)
    return c.omega * integrate(u.values**n * u.grid.nodes ** (n - 1), u.grid)


def hyperbolic_ln_norm_pow(u: RadialProfile, n: int) -> float:
    """int |u|^n dv_H, the L^n norm under the Poincare-ball volume."""
    return float(np.dot(u.values**n, cell_hyperbolic_volumes(u.grid, n)))


def singular_mt(
    u: RadialProfile, n: int, beta: float, exponent_scale: float = 1.0
) -> MTResult:
    """Singular exponential integral with weight r^(-beta).

    omega * int exp(scale * (1 - beta/n) * alpha_n * u^(n/(n-1))) r^(n-beta-1) dr,
    evaluated in log space per node and clamped at exp(700); a clamped node
    sets the overflow flag (concentrating families legitimately get there,
    so the flag is data rather than an error).
    """
    _check_beta(beta, n)
    if exponent_scale <= 0.0:
        raise DomainError(f"exponent_scale must be positive, got {exponent_scale}")
    c = make_constants(n)
    g = u.grid
    log_integrand = (
        exponent_scale * (1.0 - beta / n) * c.alpha_n * u.values ** (n / (n - 1.0))
        + (n - beta - 1.0) * np.log(g.nodes)
    )
    overflow = bool(np.any(log_integrand > EXP_CLAMP))
    vals = np.exp(np.minimum(log_integrand, EXP_CLAMP))
    return MTResult(c.omega * integrate(vals, g), overflow)


def hyperbolic_mt(u: RadialProfile, n: int, beta: float, m: int) -> HyperbolicMTResult:
    """Regularized exponential integral against the hyperbolic volume weight.

    omega * int E_m((1-beta/n) alpha_n u^(n/(n-1))) (1-r^2)^(-n) r^(n-beta-1) dr
    with E_m the order-m exponential tail.  m = n is the convergent
    regularization for admissible profiles; m = n-1 is allowed only as a
    divergence probe.  The divergence flag fires when the last decade of
    nodes carries more than half the integral.
    """
    _check_beta(beta, n)
    if m not in (n - 1, n):
        raise DomainError(f"truncation m must be n-1 or n (= {n-1} or {n}), got {m}")
    c = make_constants(n)
    g = u.grid
    x = (1.0 - beta / n) * c.alpha_n * u.values ** (n / (n - 1.0))
    overflow = bool(np.any(x > EXP_CLAMP))
    e_vals = truncated_exp(np.minimum(x, EXP_CLAMP), m)
    integrand = e_vals / g.one_minus_r2**n * g.nodes ** (n - beta - 1.0)
    value = c.omega * integrate(integrand, g)
    flag = _tail_share(integrand, g) > TAIL_SHARE_THRESHOLD
    return HyperbolicMTResult(value, flag, overflow)


def hyperbolic_volume(r: float, n: int, *, n_quad: int = 200_001) -> float:
    """Volume of the Euclidean ball of radius r under the hyperbolic metric.

    omega * int_0^r (2/(1-s^2))^n s^(n-1) ds on a dedicated dense mesh
    (uniform core plus a geometric layer when r approaches 1), independent
    of any profile grid.  Strictly increasing in r.
    """
    c = make_constants(n)
    if not (0.0 <= r < 1.0):
        raise DomainError(f"radius must lie in [0, 1), got {r}")
    if r == 0.0:
        return 0.0
    core = min(r, 0.9)
    xs = np.linspace(0.0, core, n_quad)
    integrand = (2.0 / (1.0 - xs**2)) ** n * xs ** (n - 1)
    total = float(np.trapezoid(integrand, xs))
    if r > core:
        s = np.geomspace(1.0 - core, 1.0 - r, n_quad // 2)
        one_minus_sq = s * (2.0 - s)
        integrand = (2.0 / one_minus_sq) ** n * (1.0 - s) ** (n - 1)
        # s decreasing => reverse orientation
        total += float(np.trapezoid(integrand[::-1], (1.0 - s)[::-1]))
    return c.omega * total


def cell_hyperbolic_volumes(grid: RadialGrid, n: int) -> np.ndarray:
    """Hyperbolic volume attached to each node's trapezoid cell."""
    c = make_constants(n)
    density = (2.0 / grid.one_minus_r2) ** n * grid.nodes ** (n - 1)
    return c.omega * density * trapezoid_weights(grid.nodes)


def rearrange(u: RadialProfile, n: int) -> RadialProfile:
    """Radial non-increasing rearrangement w.r.t. the hyperbolic volume.

    Each node cell is an atom (value, hyperbolic volume).  Atoms are sorted
    by value (stable, preserving cell order on ties), laid out along the
    cumulative-volume axis, and averaged back onto the original cells.
    The construction conserves int u dv_H exactly and int f(u) dv_H up to
    a second-order cell-quantization term; a profile that is already
    non-increasing is returned unchanged at every node.
    """
    if np.any(u.values < 0):
        raise PreconditionError("rearrange requires a nonnegative profile")
    w = cell_hyperbolic_volumes(u.grid, n)
    order = np.argsort(-u.values, kind="stable")
    w_sorted = w[order]
    cum_w_src = np.concatenate([[0.0], np.cumsum(w_sorted)])
    cum_int_src = np.concatenate([[0.0], np.cumsum(u.values[order] * w_sorted)])
    cum_w_tgt = np.concatenate([[0.0], np.cumsum(w)])
    block_int = np.interp(cum_w_tgt, cum_w_src, cum_int_src)
    star = np.diff(block_int) / np.diff(cum_w_tgt)
    star = np.minimum.accumulate(star)  # remove rounding-level violations
    return RadialProfile(u.grid, star, enforce_zero_boundary=False)


def check_polya_szego(u: RadialProfile, n: int) -> PolyaSzegoResult:
    """Energy drop under rearrangement; nonnegative up to quadrature noise."""
    star = rearrange(u, n)
    margin = grad_energy(u, n) - grad_energy(star, n)
    h_margin = h_functional(u, n) - h_functional(star, n)
    return PolyaSzegoResult(margin, h_margin)


def check_hardy_littlewood(u: RadialProfile, n: int, beta: float) -> float:
    """singular_mt gain of the rearranged profile (should be >= 0)."""
    star = rearrange(u, n)
    return singular_mt(star, n, beta).value - singular_mt(u, n, beta).value


def check_boundary_decay(u: RadialProfile, n: int, p: float) -> float:
    """sup over nodes r > 1/2 of u(r) / (1-r^2)^((n-1)/p)."""
    if p <= n:
        raise PreconditionError(f"need p > n, got p={p}, n={n}")
    g = u.grid
    mask = g.nodes > 0.5
    ratios = u.values[mask] / g.one_minus_r2[mask] ** ((n - 1.0) / p)
    return float(np.max(ratios, initial=0.0))


def functional_report(
    u: RadialProfile,
    n: int,
    beta: float = 0.0,
    truncation_m: Optional[int] = None,
    potential: Optional[Potential] = None,
    rearrangement_checks: bool = False,
) -> FunctionalReport:
    """Evaluate every functional for one profile and collect the margins."""
    m = n if truncation_m is None else truncation_m
    grad = grad_energy(u, n)
    hardy = hardy_term(u, n)
    if potential is None or potential.kind == "hardy":
        h_val = grad - hardy
    else:
        h_val = q_v_functional(u, potential, n)
    mt = singular_mt(u, n, beta)
    hyp = hyperbolic_mt(u, n, beta, m)
    hardy_flag = hardy_tail_share(u, n) > TAIL_SHARE_THRESHOLD
    margins = {"hardy_inequality": grad - hardy}
    if rearrangement_checks:
        ps = check_polya_szego(u, n)
        margins["polya_szego"] = ps.margin
        margins["polya_szego_h"] = ps.h_margin
        margins["hardy_littlewood"] = check_hardy_littlewood(u, n, beta)
    return FunctionalReport(
        grad_energy=grad,
        hardy_term=hardy,
        h_value=h_val,
        mt_integral=mt.value,
        hyperbolic_mt=hyp.value,
        beta=beta,
        truncation_m=m,
        overflow=mt.overflow or hyp.overflow,
        divergence_flag=hyp.divergence_flag or hardy_flag,
        margins=margins,
    )


def _check_beta(beta: float, n: int) -> None:
    if not (0.0 <= beta < n):
        raise DomainError(f"beta must lie in [0, n) = [0, {n}), got {beta}")
