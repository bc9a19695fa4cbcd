"""Laplace spectrum of the link manifold N and quadrature-based projection.

Real bases are used throughout: the circle carries {1, cos m theta, sin m theta}
and the 2-sphere carries real spherical harmonics, both normalized to unit L^2
norm on N. Quadrature grids are fixed at construction from m_max so that every
Gram integrand up to band m_max is integrated exactly (trapezoid rule on the
circle, Gauss-Legendre x uniform longitudes on the sphere).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import lpmv, roots_legendre

from .errors import CapabilityError, ConfigurationError, ValidationError


class LinkKind(str, enum.Enum):
    CIRCLE = "circle"                            # N = S^1, n = 2
    ROUND_SPHERE_2 = "round_sphere_2"            # N = S^2, n = 3
    ROUND_SPHERE_GENERAL = "round_sphere_general"  # N = S^{n-1}, eigenvalues only
    CUSTOM = "custom"


@dataclass(frozen=True)
class Band:
    """One eigenvalue band: lambda_m^2 with its multiplicity."""
    m: int
    lambda_sq: float
    multiplicity: int


@dataclass(frozen=True)
class EigenMode:
    """Orthonormal eigenfunction f_{m,k}; ``k`` indexes within the band."""
    m: int
    k: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, omega):
        return self.evaluator(omega)


def _sphere_multiplicity(n: int, m: int) -> int:
    # dim of degree-m spherical harmonics on S^{n-1}
    if m == 0:
        return 1
    high = math.comb(m + n - 1, m)
    low = math.comb(m + n - 3, m - 2) if m >= 2 else 0
    return high - low


class LinkSpectrum:
    """Eigenvalues, eigenfunctions, and the quadrature grid of the link.

    Immutable after construction; projection and evaluation are re-entrant.
    """

    def __init__(self, link_kind: LinkKind, n: int, bands: list[Band],
                 nodes: np.ndarray | None, weights: np.ndarray | None,
                 modes: list[EigenMode] | None, mode_matrix: np.ndarray | None):
        self.link_kind = link_kind
        self.n = n
        self.bands = bands
        self.m_max = bands[-1].m
        self.nodes = nodes
        self.weights = weights
        self.modes = modes
        self.mode_matrix = mode_matrix

    # -- factories -------------------------------------------------------

    @classmethod
    def circle(cls, m_max: int) -> "LinkSpectrum":
        q = 4 * m_max + 1
        theta = 2.0 * np.pi * np.arange(q) / q
        weights = np.full(q, 2.0 * np.pi / q)
        bands = [Band(0, 0.0, 1)] + [Band(m, float(m * m), 2) for m in range(1, m_max + 1)]
        modes = [EigenMode(0, 0, _circle_mode(0, 0), "const")]
        for m in range(1, m_max + 1):
            modes.append(EigenMode(m, 0, _circle_mode(m, 0), f"cos {m}t"))
            modes.append(EigenMode(m, 1, _circle_mode(m, 1), f"sin {m}t"))
        matrix = np.vstack([mode(theta) for mode in modes])
        return cls(LinkKind.CIRCLE, 2, bands, theta, weights, modes, matrix)

    @classmethod
    def round_sphere_2(cls, m_max: int) -> "LinkSpectrum":
        n_gl = 2 * m_max + 1
        x, glw = roots_legendre(n_gl)
        theta = np.arccos(x)
        n_lon = 4 * m_max + 1
        lon = 2.0 * np.pi * np.arange(n_lon) / n_lon
        tt, pp = np.meshgrid(theta, lon, indexing="ij")
        nodes = np.column_stack([tt.ravel(), pp.ravel()])
        weights = np.repeat(glw, n_lon) * (2.0 * np.pi / n_lon)
        bands = [Band(m, float(m * (m + 1)), 2 * m + 1) for m in range(m_max + 1)]
        modes = []
        for l in range(m_max + 1):
            modes.append(EigenMode(l, 0, _sphere_mode(l, 0, "zonal"), f"Y({l},0)"))
            k = 1
            for q in range(1, l + 1):
                modes.append(EigenMode(l, k, _sphere_mode(l, q, "cos"), f"Y({l},{q}c)"))
                modes.append(EigenMode(l, k + 1, _sphere_mode(l, q, "sin"), f"Y({l},{q}s)"))
                k += 2
        matrix = np.vstack([mode(nodes) for mode in modes])
        return cls(LinkKind.ROUND_SPHERE_2, 3, bands, nodes, weights, modes, matrix)

    @classmethod
    def round_sphere_general(cls, n: int, m_max: int) -> "LinkSpectrum":
        bands = [Band(m, float(m * (m + n - 2)), _sphere_multiplicity(n, m))
                 for m in range(m_max + 1)]
        return cls(LinkKind.ROUND_SPHERE_GENERAL, n, bands, None, None, None, None)

    @classmethod
    def custom(cls, n: int, lambda_sq, multiplicities=None,
               mode_samples: np.ndarray | None = None,
               weights: np.ndarray | None = None) -> "LinkSpectrum":
        """Spectrum from a user table; eigenfunctions optional as node samples.

        ``mode_samples`` has one row per quadrature node and one column per
        mode (bands expanded by multiplicity, ordered by band). Columns must
        be orthonormal under the supplied quadrature weights (uniform 1/Q if
        omitted).
        """
        lam = np.asarray(lambda_sq, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValidationError("custom spectrum needs at least the bands m = 0, 1")
        if lam[0] != 0.0:
            raise ValidationError("lambda_0^2 must be 0")
        if not np.all(np.diff(lam) > 0):
            raise ValidationError("lambda_m^2 must be strictly increasing")
        if multiplicities is None:
            mult = [1] * lam.size
        else:
            mult = [int(k) for k in multiplicities]
            if len(mult) != lam.size or any(k < 1 for k in mult):
                raise ValidationError("multiplicities must be positive, one per band")
        bands = [Band(m, float(lam[m]), mult[m]) for m in range(lam.size)]
        matrix = None
        nodes = None
        if mode_samples is not None:
            mode_samples = np.asarray(mode_samples, dtype=float)
            n_modes = sum(mult)
            if mode_samples.ndim != 2 or mode_samples.shape[1] != n_modes:
                raise ValidationError(
                    f"mode sample matrix must have {n_modes} columns (one per mode)")
            matrix = mode_samples.T.copy()
            nodes = np.arange(mode_samples.shape[0], dtype=float)
            if weights is None:
                weights = np.full(mode_samples.shape[0], 1.0 / mode_samples.shape[0])
            else:
                weights = np.asarray(weights, dtype=float)
                if weights.shape != (mode_samples.shape[0],):
                    raise ValidationError("weights must match the sample node count")
            gram = (matrix * weights) @ matrix.T
            if np.max(np.abs(gram - np.eye(n_modes))) > 1.0e-10:
                raise ValidationError("custom mode samples are not orthonormal "
                                      "under the quadrature weights (tol 1e-10)")
        return cls(LinkKind.CUSTOM, n, bands, nodes, weights, None, matrix)

    # -- accessors ---------------------------------------------------------

    @property
    def supports_evaluation(self) -> bool:
        return self.mode_matrix is not None

    @property
    def n_modes(self) -> int:
        return sum(b.multiplicity for b in self.bands)

    def band(self, m: int) -> Band:
        if not 0 <= m <= self.m_max:
            raise IndexError(f"band {m} outside 0..{self.m_max}")
        return self.bands[m]

    def mode(self, m: int, k: int) -> EigenMode:
        if self.modes is None:
            raise CapabilityError(f"{self.link_kind.value} spectrum has no mode evaluators")
        base = self.mode_offset(m)
        if not 0 <= k < self.band(m).multiplicity:
            raise IndexError(f"mode index k={k} outside band {m} (multiplicity "
                             f"{self.band(m).multiplicity})")
        return self.modes[base + k]

    def mode_offset(self, m: int) -> int:
        self.band(m)
        return sum(b.multiplicity for b in self.bands[:m])

    def band_slice(self, m: int) -> slice:
        off = self.mode_offset(m)
        return slice(off, off + self.band(m).multiplicity)

    def constant_mode_value(self) -> float:
        """Value of the normalized constant eigenfunction f_{0,0}."""
        if self.link_kind is LinkKind.CIRCLE:
            return 1.0 / math.sqrt(2.0 * math.pi)
        if self.link_kind is LinkKind.ROUND_SPHERE_2:
            return 1.0 / math.sqrt(4.0 * math.pi)
        if self.mode_matrix is not None:
            return float(self.mode_matrix[0, 0])
        raise CapabilityError(f"{self.link_kind.value} spectrum has no mode evaluators")

    # -- numerics ----------------------------------------------------------

    def project(self, samples: np.ndarray) -> np.ndarray:
        """Coefficients c_{m,k} = <h, f_{m,k}> under the quadrature inner product."""
        if not self.supports_evaluation:
            raise CapabilityError(
                f"projection needs eigenfunctions; {self.link_kind.value} has none")
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (self.mode_matrix.shape[1],):
            raise ConfigurationError(
                f"boundary samples must live on the quadrature grid "
                f"({self.mode_matrix.shape[1]} nodes), got shape {samples.shape}")
        return self.mode_matrix @ (self.weights * samples)

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        """Evaluate sum c_{m,k} f_{m,k} back on the quadrature grid."""
        if not self.supports_evaluation:
            raise CapabilityError(
                f"synthesis needs eigenfunctions; {self.link_kind.value} has none")
        coefficients = np.asarray(coefficients, dtype=float)
        return coefficients @ self.mode_matrix

    def gram(self) -> np.ndarray:
        if not self.supports_evaluation:
            raise CapabilityError("no eigenfunctions to form a Gram matrix from")
        return (self.mode_matrix * self.weights) @ self.mode_matrix.T

    def quadrature_norm_sq(self, samples: np.ndarray) -> float:
        return float(np.sum(self.weights * np.asarray(samples, float) ** 2))

    def __repr__(self):
        return (f"LinkSpectrum(kind={self.link_kind.value!r}, n={self.n}, "
                f"m_max={self.m_max})")


def _circle_mode(m: int, k: int):
    if m == 0:
        c = 1.0 / math.sqrt(2.0 * math.pi)
        return lambda theta: np.full_like(np.asarray(theta, dtype=float), c)
    c = 1.0 / math.sqrt(math.pi)
    if k == 0:
        return lambda theta: c * np.cos(m * np.asarray(theta, dtype=float))
    return lambda theta: c * np.sin(m * np.asarray(theta, dtype=float))


def _sphere_mode(l: int, q: int, part: str):
    # unit-L^2 real spherical harmonic on S^2; lpmv carries the
    # Condon-Shortley phase, which orthonormality does not see
    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi)
                     * math.factorial(l - q) / math.factorial(l + q))
    if part != "zonal":
        norm *= math.sqrt(2.0)

    def evaluator(omega):
        omega = np.asarray(omega, dtype=float)
        theta, phi = omega[..., 0], omega[..., 1]
        leg = lpmv(q, l, np.cos(theta))
        if part == "zonal":
            return norm * leg
        if part == "cos":
            return norm * leg * np.cos(q * phi)
        return norm * leg * np.sin(q * phi)

    return evaluator


# -- module-level operation surface ---------------------------------------

def build_spectrum(link_kind: LinkKind | str, n: int, m_max: int) -> LinkSpectrum:
    """Construct the spectrum for a built-in link, validating (kind, n)."""
    link_kind = LinkKind(link_kind)
    if m_max < 1:
        raise ConfigurationError(f"m_max must be >= 1, got {m_max}")
    if link_kind is LinkKind.CIRCLE:
        if n != 2:
            raise ConfigurationError(f"circle link requires n = 2, got n = {n}")
        return LinkSpectrum.circle(m_max)
    if link_kind is LinkKind.ROUND_SPHERE_2:
        if n != 3:
            raise ConfigurationError(f"2-sphere link requires n = 3, got n = {n}")
        return LinkSpectrum.round_sphere_2(m_max)
    if link_kind is LinkKind.ROUND_SPHERE_GENERAL:
        if n < 3:
            raise ConfigurationError(f"general sphere link requires n >= 3, got n = {n}")
        return LinkSpectrum.round_sphere_general(n, m_max)
    raise ConfigurationError("custom spectra are built via LinkSpectrum.custom "
                             "or load_custom_spectrum")


def first_eigenvalue(s: LinkSpectrum) -> float:
    """lambda_1 = sqrt(lambda_1^2), the first nontrivial eigenvalue."""
    lam_sq = s.band(1).lambda_sq
    if lam_sq <= 0:
        raise ValidationError(f"lambda_1^2 must be positive, got {lam_sq}")
    return math.sqrt(lam_sq)


def project(s: LinkSpectrum, samples: np.ndarray) -> np.ndarray:
    return s.project(samples)


def eval_mode(s: LinkSpectrum, mode, omega):
    """Evaluate an eigenfunction; ``mode`` is an EigenMode or an (m, k) pair."""
    if not isinstance(mode, EigenMode):
        m, k = mode
        mode = s.mode(m, k)
    return mode(omega)


def load_custom_spectrum(path: str | Path, n: int,
                         samples_path: str | Path | None = None,
                         weights_path: str | Path | None = None) -> LinkSpectrum:
    """Load a custom spectrum from CSV with header ``m,lambda_sq,multiplicity``.

    Optional eigenfunction samples come from a plain numeric CSV matrix with
    one row per quadrature node and one column per mode; optional weights from
    a one-column file.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader)]
        if header != ["m", "lambda_sq", "multiplicity"]:
            raise ValidationError(
                f"expected header m,lambda_sq,multiplicity in {path}, got {header}")
        rows = [row for row in reader if row]
    ms = [int(row[0]) for row in rows]
    if ms != list(range(len(ms))):
        raise ValidationError("band indices m must be contiguous from 0")
    lam = [float(row[1]) for row in rows]
    mult = [int(row[2]) for row in rows]
    samples = np.loadtxt(samples_path, delimiter=",", ndmin=2) if samples_path else None
    weights = np.loadtxt(weights_path, delimiter=",") if weights_path else None
    return LinkSpectrum.custom(n, lam, mult, samples, weights)
