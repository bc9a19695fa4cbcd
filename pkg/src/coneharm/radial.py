"""Regular radial profiles of separated harmonic functions on a cone.

For each eigenvalue band lambda_m^2 the radial factor phi_m solves

    phi_m'' + (n-1)(phi'/phi) phi_m' - (lambda_m^2/phi^2) phi_m = 0,

singular at the tip r = 0 where the coefficients blow up like 1/r and 1/r^2.
The regular solution behaves like r^{gamma_m} with gamma_m the positive root
of gamma^2 + (n-2)gamma - lambda_m^2 = 0, and can grow like r^{gamma} with
gamma in the hundreds, so everything is computed in log-space: we integrate
the Riccati variable v = phi_m'/phi_m,

    v' = lambda^2/phi^2 - v^2 - (n-1)(phi'/phi) v,

outward from a Frobenius start, accumulate log phi_m = integral of v, and
normalize so that log phi_m(1) = 0. Outward integration is self-correcting:
contamination by the singular second solution decays like
(r_start/r)^{2 gamma + n - 2} relative to the regular one.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, NumericalError, ValidationError
from .warping import WarpingFunction, WarpingKind

FROBENIUS_START = 1.0e-4
DEFAULT_RTOL = 1.0e-10
DEFAULT_ATOL = 1.0e-12
POINTS_PER_DECADE = 256


def indicial_exponent(n: int, lambda_sq: float) -> float:
    """Positive root gamma of gamma^2 + (n-2)gamma - lambda_sq = 0.

    This is the leading power r^gamma of the regular solution at the tip,
    where phi(r) ~ r. gamma = 0 exactly when lambda_sq = 0.
    """
    b = n - 2.0
    return 0.5 * (-b + math.sqrt(b * b + 4.0 * lambda_sq))


@dataclass(eq=False)
class RadialProfile:
    """Regular solution phi_m stored as (r, log phi_m, v) on a log-uniform grid.

    Normalized so log phi_m(1) = 0; every downstream consumer uses ratios,
    which are normalization-invariant.
    """

    lambda_sq: float
    n: int
    indicial_exponent: float
    r: np.ndarray
    log_phi: np.ndarray
    v: np.ndarray
    warping: WarpingFunction
    _interp: CubicHermiteSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        if self._interp is None and self.lambda_sq > 0.0:
            # v = d(log phi_m)/dr makes the Hermite interpolant C^1-consistent
            self._interp = CubicHermiteSpline(self.r, self.log_phi, self.v)

    def log_value(self, r: float) -> float:
        """log phi_m(r); Frobenius asymptotic gamma*log r below the grid start."""
        if r < 0.0 or r > self.r[-1] * (1.0 + 1e-12):
            raise DomainError(f"r = {r} outside profile range (0, {self.r[-1]}]")
        if self.lambda_sq == 0.0:
            return 0.0
        if r == 0.0:
            return -math.inf
        if r < self.r[0]:
            return float(self.log_phi[0]) + self.indicial_exponent * math.log(r / self.r[0])
        return float(self._interp(r))

    def v_value(self, r: float) -> float:
        if self.lambda_sq == 0.0:
            return 0.0
        if r < self.r[0]:
            return self.indicial_exponent / r
        return float(self._interp.derivative()(r))

    def to_csv(self, path: str | Path) -> None:
        """Dump the stored grid as ``r,log_phi_m,v`` for debugging."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["r", "log_phi_m", "v"])
            for row in zip(self.r, self.log_phi, self.v):
                writer.writerow([repr(float(x)) for x in row])


def profile_ratio(p: RadialProfile, r: float, R: float) -> float:
    """phi_m(r)/phi_m(R) = exp(log phi_m(r) - log phi_m(R)), never forming phi_m.

    In [0, 1] for r <= R since the regular profile is nondecreasing.
    """
    if R <= 0.0:
        raise DomainError(f"R must be positive, got {R}")
    return math.exp(p.log_value(r) - p.log_value(R))


def solve_profile(w: WarpingFunction, n: int, lambda_sq: float, r_grid,
                  exact_path: bool = True, rtol: float = DEFAULT_RTOL,
                  atol: float = DEFAULT_ATOL,
                  points_per_decade: int = POINTS_PER_DECADE) -> RadialProfile:
    """Integrate the regular radial profile over the span of ``r_grid``.

    The Riccati equation is integrated from r_start = min(1e-4, r_grid[0]),
    initialized by the Frobenius leading term v = gamma/r corrected to first
    order in r (the correction uses phi''(r_start)/2, the local quadratic
    coefficient of the warping). The stored grid is log-uniform over
    [r_start, max(r_grid[-1], 1)] so the anchor r = 1 is always covered.

    ``exact_path=False`` forces the generic integrator even for the Euclidean
    warping, whose profile gamma*log r is otherwise returned in closed form.
    """
    r_grid = np.atleast_1d(np.asarray(r_grid, dtype=float))
    if r_grid.size < 1 or np.any(np.diff(r_grid) <= 0):
        raise ValidationError("r_grid must be a nonempty increasing grid")
    if r_grid[0] <= 0.0:
        raise DomainError("r_grid must lie in (0, r_max]")
    if r_grid[-1] > w.r_max:
        raise DomainError(f"r_grid extends beyond r_max = {w.r_max}")
    if lambda_sq < 0.0:
        raise ValidationError(f"lambda_sq must be nonnegative, got {lambda_sq}")
    if w.r_max < 1.0:
        raise DomainError("profiles are anchored at r = 1, which needs r_max >= 1")

    gamma = indicial_exponent(n, lambda_sq)
    r_start = min(FROBENIUS_START, float(r_grid[0]))
    r_end = max(float(r_grid[-1]), 1.0)
    decades = math.log10(r_end / r_start)
    grid = np.geomspace(r_start, r_end, max(int(math.ceil(decades * points_per_decade)), 8) + 1)

    if lambda_sq == 0.0:
        return RadialProfile(0.0, n, 0.0, grid, np.zeros_like(grid), np.zeros_like(grid), w)

    if exact_path and w.kind is WarpingKind.EUCLIDEAN:
        return RadialProfile(lambda_sq, n, gamma, grid, gamma * np.log(grid), gamma / grid, w)

    log_deriv, inv_sq = _scalar_coefficients(w)
    lam = float(lambda_sq)
    n1 = float(n - 1)

    def rhs(r, y):
        v = y[1]
        return (v, lam * inv_sq(r) - v * v - n1 * log_deriv(r) * v)

    # Frobenius start: phi(r) = r(1 + a r + ...) gives
    # v(r) = gamma/r - a (gamma (n-1) + 2 lambda^2) / (2 gamma + n - 1) + O(r)
    a = w.eval(r_start)[2] / 2.0
    c1 = -a * (gamma * n1 + 2.0 * lam) / (2.0 * gamma + n - 1.0)
    v0 = gamma / r_start + c1

    sol = solve_ivp(rhs, (r_start, r_end), [0.0, v0], method="DOP853",
                    rtol=rtol, atol=atol, t_eval=grid, dense_output=True)
    if not sol.success:
        raise NumericalError(f"radial integration failed near r = {sol.t[-1] if sol.t.size else r_start}: "
                             f"{sol.message}")
    anchor = float(sol.sol(1.0)[0])
    return RadialProfile(lam, n, gamma, grid, sol.y[0] - anchor, sol.y[1], w)


def _scalar_coefficients(w: WarpingFunction):
    """Fast scalar (phi'/phi, 1/phi^2) closures for the integrator RHS."""
    if w.kind is WarpingKind.EUCLIDEAN:
        return (lambda r: 1.0 / r), (lambda r: 1.0 / (r * r))
    if w.kind is WarpingKind.HYPERBOLIC:
        def inv_sq(r):
            if r < 1.0:
                s = math.sinh(r)
                return 1.0 / (s * s)
            e = math.exp(-r)
            q = 2.0 * e / (1.0 - e * e)
            return q * q
        return (lambda r: 1.0 / math.tanh(r)), inv_sq
    if w.kind is WarpingKind.BOUNDED:
        def inv_sq(r):
            q = (1.0 + r) / r
            return q * q
        return (lambda r: 1.0 / (r * (1.0 + r))), inv_sq

    def log_deriv(r):
        phi, phi_p, _ = w.eval(r)
        return phi_p / phi

    def inv_sq(r):
        return 1.0 / w.eval(r)[0] ** 2

    return log_deriv, inv_sq


def closed_form_2d_log(w: WarpingFunction, m: int, r: float) -> float:
    """log of the two-dimensional closed-form profile exp(int_1^r m/phi ds)."""
    if m < 1 or int(m) != m:
        raise ValidationError(f"mode index m must be a positive integer, got {m}")
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    if r > w.r_max:
        raise DomainError(f"r = {r} beyond r_max = {w.r_max}")
    if r == 1.0:
        return 0.0
    integrand = lambda s: float(m) * float(w.inv_phi(s))
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = quad(integrand, 1.0, r, epsabs=1.0e-13, epsrel=1.0e-12, limit=400)
        except IntegrationWarning as exc:
            raise NumericalError(f"quadrature of the 2-d closed form failed: {exc}") from exc
    return val


def closed_form_2d(w: WarpingFunction, m: int, r: float) -> float:
    """The paper-style 2-d profile exp(int_1^r m/phi(s) ds), n = 2 only."""
    return math.exp(closed_form_2d_log(w, m, r))


def ode_residual(p: RadialProfile) -> np.ndarray:
    """Relative ODE residual at interior grid nodes, from stored values only.

    Reconstructs v' by fourth-order central differences on the log-uniform
    grid and forms (v' + v^2) + (n-1)(phi'/phi)v - lambda^2/phi^2, scaled by
    the largest of the three terms. Independent of the integrator's own RHS
    bookkeeping in the sense that it only sees the tabulated (r, v) values.
    """
    if p.lambda_sq == 0.0:
        return np.zeros(max(p.r.size - 4, 0))
    r = p.r
    v = p.v
    t = np.log(r)
    h = (t[-1] - t[0]) / (t.size - 1)
    i = np.arange(2, r.size - 2)
    dv_dt = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12.0 * h)
    v_prime = dv_dt / r[i]
    ld = np.asarray(p.warping.log_derivative(r[i]), dtype=float)
    iq = np.asarray(p.warping.inv_phi_sq(r[i]), dtype=float)
    term_sq = v_prime + v[i] ** 2
    term_fo = (p.n - 1) * ld * v[i]
    term_ev = p.lambda_sq * iq
    residual = term_sq + term_fo - term_ev
    scale = np.maximum.reduce([np.abs(term_sq), np.abs(term_fo), np.abs(term_ev)])
    return residual / np.maximum(scale, np.finfo(float).tiny)
