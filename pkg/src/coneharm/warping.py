"""Warping functions phi(r) defining cone metrics dr^2 + phi(r)^2 g_omega.

Every warping satisfies phi(0) = 0 and phi'(0) = 1. The radial curvature
K(r) = -phi''(r)/phi(r) drives the choice of growth-bound regime: phi'' <= 0
means K >= 0, phi'' >= 0 means K <= 0 (and then phi' >= 1).
"""

from __future__ import annotations

import csv
import enum
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError, ValidationError

DEFAULT_R_MAX = 1.0e3

# |phi''| at or below this counts as exactly zero when classifying curvature.
CURVATURE_SIGN_TOL = 1.0e-12

# Tabulated data must extrapolate to the tip conditions within these.
TIP_VALUE_TOL = 1.0e-6
TIP_SLOPE_TOL = 1.0e-3


class WarpingKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    BOUNDED = "bounded"
    TABULATED = "tabulated"


class CurvatureSign(str, enum.Enum):
    NONNEGATIVE = "nonnegative"
    NONPOSITIVE = "nonpositive"
    MIXED = "mixed"


class WarpingFunction:
    """Immutable warping function with closed-form or interpolated derivatives.

    Built-in kinds:

    * ``euclidean``: phi = r (flat cone)
    * ``hyperbolic``: phi = sinh r (curvature -1)
    * ``bounded``: phi = r/(1+r) (phi = o(r), nonnegative radial curvature)
    * ``tabulated``: user grid of (r, phi, phi', phi'') joined by a cubic
      Hermite spline so the radial ODE sees C^1 coefficients

    Instances are immutable after construction; all evaluation methods are
    re-entrant.
    """

    def __init__(self, kind: WarpingKind | str, r_max: float = DEFAULT_R_MAX,
                 table: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None = None):
        kind = WarpingKind(kind)
        if not r_max > 0:
            raise ValidationError(f"r_max must be positive, got {r_max}")
        self.kind = kind
        self.r_max = float(r_max)
        self._spline = None
        self._pp_spline = None
        self._grid_start = None
        if kind is WarpingKind.TABULATED:
            if table is None:
                raise ValidationError("tabulated warping requires a (r, phi, phi', phi'') table")
            self._init_table(*table)
        elif table is not None:
            raise ValidationError(f"table given but kind is {kind.value}")

    # -- constructors --------------------------------------------------

    @classmethod
    def euclidean(cls, r_max: float = DEFAULT_R_MAX) -> "WarpingFunction":
        return cls(WarpingKind.EUCLIDEAN, r_max)

    @classmethod
    def hyperbolic(cls, r_max: float = DEFAULT_R_MAX) -> "WarpingFunction":
        return cls(WarpingKind.HYPERBOLIC, r_max)

    @classmethod
    def bounded(cls, r_max: float = DEFAULT_R_MAX) -> "WarpingFunction":
        return cls(WarpingKind.BOUNDED, r_max)

    @classmethod
    def from_table(cls, r, phi, phi_p, phi_pp) -> "WarpingFunction":
        r = np.asarray(r, dtype=float)
        return cls(WarpingKind.TABULATED, r_max=float(r[-1]),
                   table=(r, np.asarray(phi, float), np.asarray(phi_p, float),
                          np.asarray(phi_pp, float)))

    @classmethod
    def from_csv(cls, path: str | Path) -> "WarpingFunction":
        """Load a tabulated warping from a CSV with header ``r,phi,phi_p,phi_pp``."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [c.strip() for c in header] != ["r", "phi", "phi_p", "phi_pp"]:
                raise ValidationError(f"expected header r,phi,phi_p,phi_pp in {path}, got {header}")
            rows = [[float(x) for x in row] for row in reader if row]
        if not rows:
            raise ValidationError(f"no data rows in {path}")
        data = np.asarray(rows, dtype=float)
        return cls.from_table(data[:, 0], data[:, 1], data[:, 2], data[:, 3])

    def _init_table(self, r, phi, phi_p, phi_pp):
        if r.ndim != 1 or not (r.shape == phi.shape == phi_p.shape == phi_pp.shape):
            raise ValidationError("table columns must be 1-d arrays of equal length")
        if r.size < 4:
            raise ValidationError("tabulated warping needs at least 4 grid points")
        if not np.all(np.diff(r) > 0):
            raise ValidationError("tabulated r grid must be strictly increasing")
        if r[0] <= 0 or r[0] > 1.0e-3:
            raise ValidationError(f"first grid point must lie in (0, 1e-3], got {r[0]}")
        if np.any(phi <= 0):
            raise ValidationError("phi must be positive on the tabulated grid")
        self._spline = CubicHermiteSpline(r, phi, phi_p)
        self._pp_spline = CubicSpline(r, phi_pp, bc_type="natural")
        self._grid_start = float(r[0])
        self.r_max = min(self.r_max, float(r[-1]))
        # phi(0) = 0 and phi'(0) = 1, checked by extrapolating the spline to 0.
        tip = float(self._spline(0.0))
        tip_slope = float(self._spline.derivative()(0.0))
        if abs(tip) > TIP_VALUE_TOL:
            raise ValidationError(f"tabulated phi does not extrapolate to 0 at the tip (got {tip})")
        if abs(tip_slope - 1.0) > TIP_SLOPE_TOL:
            raise ValidationError(f"tabulated phi' does not extrapolate to 1 at the tip (got {tip_slope})")

    # -- evaluation ----------------------------------------------------

    def _check_domain(self, r, lo: float = 0.0):
        r = np.asarray(r, dtype=float)
        if np.any(r < lo) or np.any(r > self.r_max):
            raise DomainError(f"r outside [{lo}, {self.r_max}]")
        return r

    def eval(self, r):
        """Return ``(phi, phi', phi'')`` at ``r`` (scalar or array).

        Raises DomainError for r < 0 or r > r_max. For the hyperbolic kind
        the values overflow double precision beyond r ~ 710; the solver-facing
        helpers :meth:`log_derivative` and :meth:`inv_phi` stay finite there.
        """
        r = self._check_domain(r)
        scalar = r.ndim == 0
        with np.errstate(over="ignore"):
            if self.kind is WarpingKind.EUCLIDEAN:
                out = (r, np.ones_like(r), np.zeros_like(r))
            elif self.kind is WarpingKind.HYPERBOLIC:
                s, c = np.sinh(r), np.cosh(r)
                out = (s, c, s)
            elif self.kind is WarpingKind.BOUNDED:
                q = 1.0 + r
                out = (r / q, q ** -2.0, -2.0 * q ** -3.0)
            else:
                out = (self._spline(r), self._spline.derivative()(r), self._pp_spline(r))
        if scalar:
            return tuple(float(x) for x in out)
        return out

    def phi(self, r):
        return self.eval(r)[0]

    def log_derivative(self, r):
        """phi'(r)/phi(r), computed in an overflow-safe form (r > 0)."""
        r = self._check_domain(r, lo=np.finfo(float).tiny)
        if self.kind is WarpingKind.EUCLIDEAN:
            return 1.0 / r
        if self.kind is WarpingKind.HYPERBOLIC:
            return 1.0 / np.tanh(r)
        if self.kind is WarpingKind.BOUNDED:
            return 1.0 / (r * (1.0 + r))
        phi, phi_p, _ = self.eval(r)
        return phi_p / phi

    def inv_phi(self, r):
        """1/phi(r), overflow-safe for the hyperbolic kind (r > 0)."""
        r = self._check_domain(r, lo=np.finfo(float).tiny)
        if self.kind is WarpingKind.EUCLIDEAN:
            return 1.0 / r
        if self.kind is WarpingKind.HYPERBOLIC:
            e = np.exp(-np.asarray(r, float))
            with np.errstate(over="ignore"):
                return np.where(np.asarray(r) < 1.0, 1.0 / np.sinh(r), 2.0 * e / (1.0 - e * e))
        if self.kind is WarpingKind.BOUNDED:
            return (1.0 + r) / r
        return 1.0 / self.eval(r)[0]

    def inv_phi_sq(self, r):
        return self.inv_phi(r) ** 2

    # -- curvature -----------------------------------------------------

    def radial_curvature(self, r):
        """K(r) = -phi''(r)/phi(r); the tip r = 0 is excluded."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise DomainError("radial curvature is indeterminate at the tip r = 0")
        phi, _, phi_pp = self.eval(r)
        return -phi_pp / phi

    def classify_curvature(self, r_probe_count: int = 64) -> CurvatureSign:
        """Probe the sign of phi'' on a geometric grid in (0, r_max].

        The verdict is probe-based evidence, not a proof. When phi'' vanishes
        identically (flat cone) the tie resolves to ``NONPOSITIVE`` so that
        the general growth bound, which needs phi' >= 1, applies.
        """
        if r_probe_count < 16:
            raise ValidationError(f"r_probe_count must be >= 16, got {r_probe_count}")
        lo = self._grid_start if self._grid_start is not None else 1.0e-3
        lo = min(lo, self.r_max)
        probes = np.geomspace(lo, self.r_max, r_probe_count)
        _, _, phi_pp = self.eval(probes)
        nonneg_curv = np.all(phi_pp <= CURVATURE_SIGN_TOL)     # K >= 0
        nonpos_curv = np.all(phi_pp >= -CURVATURE_SIGN_TOL)    # K <= 0
        if nonpos_curv and nonneg_curv:
            return CurvatureSign.NONPOSITIVE
        if nonneg_curv:
            return CurvatureSign.NONNEGATIVE
        if nonpos_curv:
            return CurvatureSign.NONPOSITIVE
        return CurvatureSign.MIXED

    def __repr__(self):
        return f"WarpingFunction(kind={self.kind.value!r}, r_max={self.r_max})"
