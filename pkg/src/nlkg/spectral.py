"""Periodic pseudospectral backbone: grid, transforms, multipliers, norms.

The real line is truncated to a periodic box [-L, L) with n equispaced
points.  The discrete transform pair is normalised like the continuum
Fourier transform under the (2*pi)**(-1/2) convention, so spectral values
approximate hat(phi)(xi) directly and continuum multiplier formulas
transcribe with no hidden constants.  Cubic products are dealiased by
zero padding with a factor >= 2, which is exact for cubic nonlinearities.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as _sfft

SQRT_2PI = math.sqrt(2.0 * math.pi)
_FFT_WORKERS = min(os.cpu_count() or 1, 4)


class RepresentationError(ValueError):
    """Field is in the wrong representation for the requested operation."""


class UnsupportedNormError(ValueError):
    """Requested Lebesgue exponent or weight combination is not supported."""


class BoundarySupportWarning(UserWarning):
    """Field carries mass near the box edge, so x-weighted operators wrap."""


def bracket(x):
    """Japanese bracket sqrt(1 + x**2), elementwise."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(1.0 + x * x)


@dataclass(frozen=True)
class SpectralGrid:
    """Equispaced periodic truncation of the line.

    The box is [-half_width, half_width) sampled at n_points (a power of
    two).  Frequencies are xi_k = pi*k/half_width on the symmetric integer
    range, stored in FFT (wrapped) order; ``xi_sorted`` gives the natural
    ascending order used for interpolation.
    """

    half_width: float = 400.0
    n_points: int = 8192
    padding_factor: int = 2

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        n = self.n_points
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two >= 4")
        if self.padding_factor < 2:
            raise ValueError("padding_factor must be >= 2 for cubic dealiasing")

    @cached_property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def dxi(self) -> float:
        return math.pi / self.half_width

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_points)

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        """Integer mode indices in FFT order."""
        return np.rint(np.fft.fftfreq(self.n_points) * self.n_points).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular frequencies pi*k/L in FFT order."""
        return self.dxi * self.mode_numbers

    @cached_property
    def xi_sorted(self) -> np.ndarray:
        return np.fft.fftshift(self.xi)

    @cached_property
    def xi_bracket(self) -> np.ndarray:
        return bracket(self.xi)

    @cached_property
    def edge_phase(self) -> np.ndarray:
        # exp(-i * x_0 * xi_k) with x_0 = -L equals (-1)**k exactly
        return np.where(self.mode_numbers % 2 == 0, 1.0, -1.0)

    @cached_property
    def fine(self) -> "SpectralGrid":
        """Grid refined by padding_factor, used for dealiased products."""
        return SpectralGrid(self.half_width, self.n_points * self.padding_factor,
                            self.padding_factor)

    def sorted_view(self, spec: np.ndarray) -> np.ndarray:
        return np.fft.fftshift(spec, axes=-1)

    def wrapped_view(self, spec_sorted: np.ndarray) -> np.ndarray:
        return np.fft.ifftshift(spec_sorted, axes=-1)


def fft_forward(grid: SpectralGrid, phys: np.ndarray) -> np.ndarray:
    """Discrete approximation of hat(phi)(xi_k) on arrays (..., n)."""
    out = _sfft.fft(phys, axis=-1, workers=_FFT_WORKERS)
    out *= (grid.dx / SQRT_2PI) * grid.edge_phase
    return out


def fft_inverse(grid: SpectralGrid, spec: np.ndarray) -> np.ndarray:
    """Exact inverse of :func:`fft_forward`."""
    scale = grid.dxi * grid.n_points / SQRT_2PI
    out = _sfft.ifft(grid.edge_phase * spec, axis=-1, workers=_FFT_WORKERS)
    out *= scale
    return out


def pad_spectrum(grid: SpectralGrid, spec: np.ndarray) -> np.ndarray:
    """Embed a wrapped spectrum into the fine grid's wrapped layout.

    In wrapped order the nonnegative modes sit at the front and the
    negative ones at the tail, so padding is two block copies.
    """
    n = grid.n_points
    nf = n * grid.padding_factor
    half = n // 2
    out = np.zeros(spec.shape[:-1] + (nf,), dtype=complex)
    out[..., :half] = spec[..., :half]
    out[..., nf - half:] = spec[..., half:]
    return out


def truncate_spectrum(grid: SpectralGrid, spec_fine: np.ndarray) -> np.ndarray:
    """Restrict a fine-grid wrapped spectrum back to the base band."""
    n = grid.n_points
    nf = n * grid.padding_factor
    if spec_fine.shape[-1] != nf:
        raise ValueError("fine spectrum has wrong length")
    half = n // 2
    out = np.empty(spec_fine.shape[:-1] + (n,), dtype=complex)
    out[..., :half] = spec_fine[..., :half]
    out[..., half:] = spec_fine[..., nf - half:]
    return out


@dataclass
class VectorField:
    """N-component complex field on one grid, physical or spectral."""

    grid: SpectralGrid
    components: np.ndarray  # shape (N, n_points), complex
    representation: str = "physical"

    def __post_init__(self):
        comps = np.atleast_2d(np.asarray(self.components, dtype=complex))
        if comps.shape[-1] != self.grid.n_points:
            raise ValueError("component length does not match the grid")
        if self.representation not in ("physical", "spectral"):
            raise ValueError(f"unknown representation {self.representation!r}")
        self.components = comps

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.components.copy(), self.representation)

    @classmethod
    def from_profiles(cls, grid: SpectralGrid, funcs, representation="physical"):
        """Build a field by evaluating callables (or arrays) per component."""
        comps = []
        pts = grid.x if representation == "physical" else grid.xi
        for f in funcs:
            comps.append(f(pts) if callable(f) else np.asarray(f))
        return cls(grid, np.array(comps, dtype=complex), representation)

    @classmethod
    def zero(cls, grid: SpectralGrid, n_components: int, representation="physical"):
        return cls(grid, np.zeros((n_components, grid.n_points), dtype=complex),
                   representation)


def forward_transform(field: VectorField) -> VectorField:
    if field.representation != "physical":
        raise RepresentationError("forward_transform expects a physical field")
    return VectorField(field.grid, fft_forward(field.grid, field.components), "spectral")


def inverse_transform(field: VectorField) -> VectorField:
    if field.representation != "spectral":
        raise RepresentationError("inverse_transform expects a spectral field")
    return VectorField(field.grid, fft_inverse(field.grid, field.components), "physical")


def spectrum(field: VectorField) -> np.ndarray:
    """Wrapped spectral coefficients regardless of stored representation."""
    if field.representation == "spectral":
        return field.components
    return fft_forward(field.grid, field.components)


def physical_values(field: VectorField) -> np.ndarray:
    if field.representation == "physical":
        return field.components
    return fft_inverse(field.grid, field.components)


def _match_representation(field: VectorField, spec: np.ndarray) -> VectorField:
    if field.representation == "spectral":
        return VectorField(field.grid, spec, "spectral")
    return VectorField(field.grid, fft_inverse(field.grid, spec), "physical")


def bessel_multiplier(field: VectorField, s: float) -> VectorField:
    """Apply <i d/dx>**s, i.e. multiply the spectrum by <xi>**s."""
    if s == 0:
        return field.copy()
    spec = spectrum(field) * field.grid.xi_bracket ** s
    return _match_representation(field, spec)


def derivative(field: VectorField) -> VectorField:
    spec = spectrum(field) * (1j * field.grid.xi)
    return _match_representation(field, spec)


def free_evolve(field: VectorField, t: float) -> VectorField:
    """Free Klein-Gordon group: multiply the spectrum by exp(-i t <xi>)."""
    if t == 0:
        return field.copy()
    spec = spectrum(field) * np.exp(-1j * t * field.grid.xi_bracket)
    return _match_representation(field, spec)


def boundary_fraction(field: VectorField) -> float:
    """max |phi| on the outer 10 percent of the box over the global max."""
    vals = np.abs(physical_values(field))
    peak = vals.max()
    if peak == 0:
        return 0.0
    edge = int(0.05 * field.grid.n_points)
    outer = np.concatenate([vals[:, :edge], vals[:, -edge:]], axis=1)
    return float(outer.max() / peak)


def check_boundary_support(field: VectorField, tol: float = 1e-10, what: str = "x-weighted operator"):
    frac = boundary_fraction(field)
    if frac > tol:
        warnings.warn(
            f"{what}: field magnitude at the outer 10% of the box is "
            f"{frac:.2e} of its peak; periodic x-weight wraps around",
            BoundarySupportWarning, stacklevel=3)


def apply_J(field: VectorField, t: float) -> VectorField:
    """<i d/dx>(x phi) + i t d/dx phi, valid for fields localised in the box."""
    if field.representation != "physical":
        raise RepresentationError("apply_J expects a physical field")
    check_boundary_support(field, what="apply_J")
    grid = field.grid
    xphi = grid.x * field.components
    part1 = fft_inverse(grid, fft_forward(grid, xphi) * grid.xi_bracket)
    part2 = fft_inverse(grid, fft_forward(grid, field.components) * (1j * grid.xi))
    return VectorField(grid, part1 + (1j * t) * part2, "physical")


@dataclass(frozen=True)
class NormSpec:
    """Weighted Sobolev norm order: smoothness s, x-weight q, exponent p."""

    s: float = 0.0
    q: float = 0.0
    p: float = 2

    def __post_init__(self):
        if self.p not in (2, math.inf):
            raise UnsupportedNormError("only p = 2 and p = inf are supported")
        if self.p == math.inf and self.q != 0:
            raise UnsupportedNormError("p = inf requires q = 0")


def component_norms(field: VectorField, spec: NormSpec = NormSpec()) -> np.ndarray:
    """Per-component ||<x>^q <i d/dx>^s phi_j||_{L^p} on the grid."""
    grid = field.grid
    coeffs = spectrum(field)
    if spec.s != 0:
        coeffs = coeffs * grid.xi_bracket ** spec.s
    if spec.p == math.inf:
        vals = fft_inverse(grid, coeffs)
        return np.max(np.abs(vals), axis=-1)
    if spec.q == 0:
        # Parseval form, exact for the discrete pair
        return np.sqrt(grid.dxi * np.sum(np.abs(coeffs) ** 2, axis=-1))
    vals = fft_inverse(grid, coeffs)
    weighted = bracket(grid.x) ** spec.q * vals
    return np.sqrt(grid.dx * np.sum(np.abs(weighted) ** 2, axis=-1))


def norm(field: VectorField, spec: NormSpec = NormSpec()) -> float:
    """Sum of component norms, matching the vector-valued space definition."""
    return float(np.sum(component_norms(field, spec)))


def sobolev_norm(field: VectorField, s: float) -> float:
    return norm(field, NormSpec(s=s))


def sup_norm(field: VectorField, s: float = 0.0) -> float:
    return norm(field, NormSpec(s=s, p=math.inf))
