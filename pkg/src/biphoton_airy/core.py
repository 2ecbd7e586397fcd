"""Transverse geometry, optical configuration, and the lens kernel.

Everything here is an immutable value type or a pure function.  Lengths
are in meters throughout the package; complex amplitudes are plain
Python/numpy complex numbers carrying an arbitrary global scale (all
reported patterns are normalized, so only ratios matter).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["TransverseVector", "OpticalConfig", "lens_kernel"]


@dataclass(frozen=True)
class TransverseVector:
    """2D position in a plane transverse to the optical axis, meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError("TransverseVector components must be finite")

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dot(self, other: "TransverseVector") -> float:
        return self.x * other.x + self.y * other.y

    def __add__(self, other: "TransverseVector") -> "TransverseVector":
        return TransverseVector(self.x + other.x, self.y + other.y)

    def __neg__(self) -> "TransverseVector":
        return TransverseVector(-self.x, -self.y)


@dataclass(frozen=True)
class OpticalConfig:
    """Wavelength and lens focal length, plus the derived frequency scale.

    ``q_scale = 2 pi / (wavelength * focal_length)`` maps a detector
    coordinate r to the spatial frequency probed in the source plane.
    """

    wavelength: float
    focal_length: float

    def __post_init__(self):
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise DomainError("wavelength must be finite and positive")
        if not (math.isfinite(self.focal_length) and self.focal_length > 0):
            raise DomainError("focal_length must be finite and positive")
        if not math.isfinite(self.q_scale):
            raise DomainError("derived q_scale is not finite")

    @property
    def q_scale(self) -> float:
        return 2.0 * math.pi / (self.wavelength * self.focal_length)


def lens_kernel(
    r: TransverseVector, r0: TransverseVector, cfg: OpticalConfig
) -> complex:
    """Impulse response between the focal planes of a thin lens.

    Returns ``1/(i lam f) * exp(i 4 pi f / lam) * exp(-i 2 pi (r . r0) / (lam f))``.
    The constant phase factor cancels in every measured quantity but is
    kept so that cancellation is a testable property rather than an
    assumption; the modulus is exactly ``1 / (lam f)`` for all arguments.
    """
    lam_f = cfg.wavelength * cfg.focal_length
    global_phase = 4.0 * math.pi * cfg.focal_length / cfg.wavelength
    phase = global_phase - 2.0 * math.pi * r.dot(r0) / lam_f
    return cmath.exp(1j * phase) / (1j * lam_f)
