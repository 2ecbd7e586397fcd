"""Closed-form diffraction patterns and profile metrology.

The classical single-photon Airy pattern of a circular aperture of
radius a is ``airy_kernel(2 pi a r / (lam f))``; the coincidence pattern
of the same aperture illuminated by a position-correlated photon pair is
``airy_kernel(2 pi * 2a * r / (lam f))`` -- the argument doubles, every
radial feature halves.  This module provides both patterns, the
double-slit analog, and the metrology (first zero, FWHM, fringe period,
resolution ratio) used to quantify the factor of two.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import OpticalConfig
from .errors import DomainError, FeatureNotFoundError, InvalidMetricsError
from .special import airy_kernel

__all__ = [
    "Normalization",
    "ScanProfile",
    "PatternMetrics",
    "classical_airy_profile",
    "quantum_airy_profile",
    "classical_airy_function",
    "quantum_airy_function",
    "doubleslit_fringe_profiles",
    "first_zero",
    "fwhm",
    "fringe_period",
    "pattern_metrics",
    "resolution_ratio",
]


class Normalization(enum.Enum):
    PEAK_NORMALIZED = "peak"
    RAW_COUNTS = "raw"


@dataclass(frozen=True, eq=False)
class ScanProfile:
    """Ordered 1D samples of a pattern: positions, values, uncertainties.

    Positions must be strictly increasing.  A peak-normalized profile
    has maximum value 1 (within 1e-12); raw profiles carry counts.
    """

    positions: np.ndarray
    values: np.ndarray
    normalization: Normalization
    uncertainties: Optional[np.ndarray] = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if pos.ndim != 1 or pos.size < 2:
            raise DomainError("profile needs at least two samples")
        if val.shape != pos.shape:
            raise DomainError("positions and values must have equal length")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(val)):
            raise DomainError("profile samples must be finite")
        if np.any(np.diff(pos) <= 0):
            raise DomainError("positions must be strictly increasing")
        if np.any(val < 0):
            raise DomainError("profile values must be nonnegative")
        unc = self.uncertainties
        if unc is not None:
            unc = np.asarray(unc, dtype=float)
            if unc.shape != pos.shape:
                raise DomainError("uncertainties must match positions in length")
            if np.any(unc < 0) or not np.all(np.isfinite(unc)):
                raise DomainError("uncertainties must be finite and nonnegative")
            object.__setattr__(self, "uncertainties", unc)
        if self.normalization is Normalization.PEAK_NORMALIZED:
            if abs(val.max() - 1.0) > 1e-12:
                raise DomainError("peak-normalized profile must have max value 1")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)

    @property
    def peak_position(self) -> float:
        return float(self.positions[int(np.argmax(self.values))])


@dataclass(frozen=True)
class PatternMetrics:
    """Radial size metrics of a single-peak pattern."""

    first_zero_radius: float
    fwhm: float
    peak_position: float

    def __post_init__(self):
        if not (self.first_zero_radius > 0.5 * self.fwhm > 0):
            raise DomainError(
                "expected first_zero_radius > fwhm/2 > 0 for an Airy-type pattern"
            )


def _airy_profile(scale: float, radii) -> ScanProfile:
    radii = np.asarray(radii, dtype=float)
    values = airy_kernel(scale * radii)
    return ScanProfile(
        positions=radii,
        values=np.asarray(values, dtype=float),
        normalization=Normalization.PEAK_NORMALIZED,
    )


def classical_airy_profile(a: float, cfg: OpticalConfig, radii) -> ScanProfile:
    """Intensity pattern of a coherently lit circular aperture of radius a.

    ``airy_kernel(2 pi a r / (lam f))``; first zero at
    ``3.8317... * lam f / (2 pi a)``.
    """
    if not (math.isfinite(a) and a > 0):
        raise DomainError("aperture radius must be finite and positive")
    return _airy_profile(cfg.q_scale * a, radii)


def quantum_airy_profile(a: float, cfg: OpticalConfig, radii) -> ScanProfile:
    """Degenerate coincidence pattern of the same aperture: the argument of
    the kernel doubles, so every radial feature is half the classical size."""
    if not (math.isfinite(a) and a > 0):
        raise DomainError("aperture radius must be finite and positive")
    return _airy_profile(cfg.q_scale * 2.0 * a, radii)


def classical_airy_function(a: float, cfg: OpticalConfig) -> Callable[[float], float]:
    """Pointwise classical pattern as a callable of radial distance."""
    scale = cfg.q_scale * a
    return lambda r: airy_kernel(scale * abs(r))


def quantum_airy_function(a: float, cfg: OpticalConfig) -> Callable[[float], float]:
    """Pointwise coincidence pattern as a callable of radial distance."""
    scale = cfg.q_scale * 2.0 * a
    return lambda r: airy_kernel(scale * abs(r))


def doubleslit_fringe_profiles(
    w: float, d: float, cfg: OpticalConfig, positions
) -> tuple[ScanProfile, ScanProfile]:
    """Idealized double-slit patterns (slits of width w, centers d apart,
    infinite height).

    Classical intensity: ``sinc^2(pi w x / (lam f)) cos^2(pi d x / (lam f))``
    with fringe period ``lam f / d``.  Coincidence pattern: both spatial
    frequencies doubled, fringe period ``lam f / (2 d)``.
    """
    if not (0 < w < d):
        raise DomainError("need 0 < slit width < separation")
    x = np.asarray(positions, dtype=float)
    lam_f = cfg.wavelength * cfg.focal_length

    def pattern(g: float) -> np.ndarray:
        env = np.sinc(g * w * x / lam_f)  # numpy sinc: sin(pi t)/(pi t)
        fringe = np.cos(g * math.pi * d * x / lam_f)
        return (env * fringe) ** 2

    classical = ScanProfile(x, pattern(1.0), Normalization.PEAK_NORMALIZED)
    quantum = ScanProfile(x, pattern(2.0), Normalization.PEAK_NORMALIZED)
    return classical, quantum


def _parabolic_vertex(x: np.ndarray, y: np.ndarray) -> float:
    """Abscissa of the extremum of the parabola through three points."""
    denom = (y[0] - 2.0 * y[1] + y[2])
    if denom == 0.0:
        return float(x[1])
    # uniform spacing assumed good enough locally; use general form anyway
    d21 = x[1] - x[0]
    d32 = x[2] - x[1]
    num = (y[0] - y[1]) * d32 * d32 - (y[2] - y[1]) * d21 * d21
    den = (y[0] - y[1]) * d32 + (y[2] - y[1]) * d21
    if den == 0.0:
        return float(x[1])
    return float(x[1] + 0.5 * num / den)


def first_zero(profile: ScanProfile, threshold: float = 1e-3) -> float:
    """Distance from the peak to the first zero of the pattern.

    Scans right of the peak for the first sample below ``threshold``,
    brackets the local minimum there, and refines it with a parabola
    through the three nearest samples.  The thresholded search (rather
    than exact root finding) also works on noisy counting profiles.
    """
    if profile.normalization is not Normalization.PEAK_NORMALIZED:
        raise DomainError("first_zero expects a peak-normalized profile")
    pos, val = profile.positions, profile.values
    peak = int(np.argmax(val))
    below = np.nonzero(val[peak + 1 :] < threshold)[0]
    if below.size == 0:
        raise FeatureNotFoundError(
            f"no sample below threshold {threshold} right of the peak"
        )
    start = peak + 1 + int(below[0])
    # minimum of the contiguous below-threshold run (robust against noise
    # jiggles inside the dip)
    end = start
    while end + 1 < val.size and val[end + 1] < threshold:
        end += 1
    i = start + int(np.argmin(val[start : end + 1]))
    i = min(max(i, 1), val.size - 2)
    refined = _parabolic_vertex(pos[i - 1 : i + 2], val[i - 1 : i + 2])
    return float(refined - pos[peak])


def fwhm(profile: ScanProfile) -> float:
    """Full width at half maximum via linear interpolation of the two
    crossings around the peak.

    A radial cut whose peak sits on the first sample (an even pattern
    scanned from r = 0) is handled by symmetry: the width is twice the
    distance to the right crossing.
    """
    if profile.normalization is not Normalization.PEAK_NORMALIZED:
        raise DomainError("fwhm expects a peak-normalized profile")
    pos, val = profile.positions, profile.values
    peak = int(np.argmax(val))
    half = 0.5 * val[peak]

    def cross(indices) -> float:
        prev = peak
        for i in indices:
            if val[i] < half:
                x0, x1 = pos[i], pos[prev]
                y0, y1 = val[i], val[prev]
                return float(x0 + (half - y0) * (x1 - x0) / (y1 - y0))
            prev = i
        raise FeatureNotFoundError("half-maximum crossing not bracketed")

    right = cross(range(peak + 1, val.size))
    if peak == 0:
        return 2.0 * (right - float(pos[0]))
    left = cross(range(peak - 1, -1, -1))
    return right - left


def fringe_period(profile: ScanProfile, min_height: float = 0.05) -> float:
    """Spacing of the local maxima above ``min_height``: median of the
    peak-to-peak distances, each peak refined with a parabola.  The median
    ignores the outermost spacings, which an intensity envelope pulls
    inward."""
    pos, val = profile.positions, profile.values
    peaks = []
    for i in range(1, val.size - 1):
        if val[i] >= val[i - 1] and val[i] > val[i + 1] and val[i] >= min_height:
            peaks.append(_parabolic_vertex(pos[i - 1 : i + 2], val[i - 1 : i + 2]))
    if len(peaks) < 2:
        raise FeatureNotFoundError("need at least two fringe maxima to measure a period")
    return float(np.median(np.diff(peaks)))


def pattern_metrics(profile: ScanProfile, threshold: float = 1e-3) -> PatternMetrics:
    """First zero, FWHM, and peak position of a single-peak profile."""
    return PatternMetrics(
        first_zero_radius=first_zero(profile, threshold),
        fwhm=fwhm(profile),
        peak_position=profile.peak_position,
    )


def resolution_ratio(classical: PatternMetrics, quantum: PatternMetrics) -> float:
    """Classical-to-quantum first-zero ratio; 2 means the coincidence
    spot is half the classical size."""
    if quantum.first_zero_radius == 0:
        raise InvalidMetricsError("quantum first zero is zero")
    return classical.first_zero_radius / quantum.first_zero_radius
