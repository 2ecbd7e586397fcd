"""Two-photon amplitudes and coincidence rates in the back focal plane.

The joint detection amplitude for a photon pair born in the masked
source plane and propagated through the lens is a double integral of the
product of two lens kernels against the pair correlation function.  For
a position-correlated (delta) source this collapses to a single 2D
integral and the coincidence rate becomes the squared Fourier transform
of the mask evaluated at ``q = q_scale * (r1 + r2)`` -- the pattern
depends on the detector coordinates only through their sum, which is why
the degenerate cut r1 = r2 = r shows an Airy disk with doubled argument.

All integrals are midpoint-rule sums on a uniform square grid.  The
grid must satisfy the phase-sampling bound (no more than half a period
of the fastest kernel oscillation per step, with the two-photon doubled
frequency already included): ``step <= lam f / (4 r_max)`` where r_max
is the largest detector coordinate queried.  Grids violating the bound
alias the oscillation and are refused outright.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .analytic import Normalization, ScanProfile
from .core import OpticalConfig, TransverseVector
from .errors import CostBudgetError, DomainError, ResolutionError
from .masks import ApertureMask, support_radius, transmittance_grid

__all__ = [
    "IdealDelta",
    "GaussianCorrelated",
    "BiphotonSource",
    "IDEAL_DELTA",
    "QuadratureSpec",
    "CoincidenceMap",
    "biphoton_amplitude_ideal",
    "biphoton_amplitude_general",
    "coincidence_rate",
    "degenerate_profile",
    "coincidence_map",
    "mask_fourier_numeric",
]

DEFAULT_COST_BUDGET = 10**9  # 4D integrand evaluations per call


@dataclass(frozen=True)
class IdealDelta:
    """Both photons created at the same transverse point: the pair
    correlation is a delta function of the coordinate difference."""


@dataclass(frozen=True)
class GaussianCorrelated:
    """Gaussian pair correlation with finite correlation width and
    beam envelope:

    ``C(r', r'') = exp(-|r' - r''|^2 / (2 s_c^2)) * exp(-|r' + r''|^2 / (8 s_b^2))``

    The delta source is the limit s_c -> 0, s_b -> infinity.
    """

    correlation_width: float
    beam_width: float

    def __post_init__(self):
        if not (math.isfinite(self.correlation_width) and self.correlation_width > 0):
            raise DomainError("correlation_width must be finite and positive")
        if not (math.isfinite(self.beam_width) and self.beam_width > 0):
            raise DomainError("beam_width must be finite and positive")
        if self.correlation_width > self.beam_width:
            raise DomainError("correlation_width must not exceed beam_width")


BiphotonSource = Union[IdealDelta, GaussianCorrelated]

IDEAL_DELTA = IdealDelta()


@dataclass(frozen=True)
class QuadratureSpec:
    """Uniform midpoint grid on [-half_extent, half_extent]^2."""

    half_extent: float
    samples_per_axis: int

    def __post_init__(self):
        if not (math.isfinite(self.half_extent) and self.half_extent > 0):
            raise DomainError("half_extent must be finite and positive")
        if self.samples_per_axis < 2:
            raise DomainError("samples_per_axis must be at least 2")

    @property
    def step(self) -> float:
        return 2.0 * self.half_extent / self.samples_per_axis

    def centers(self) -> np.ndarray:
        return (
            -self.half_extent + (np.arange(self.samples_per_axis) + 0.5) * self.step
        )

    def max_detector_radius(self, cfg: OpticalConfig) -> float:
        """Largest detector coordinate this grid can serve without aliasing."""
        return cfg.wavelength * cfg.focal_length / (4.0 * self.step)

    def require_valid(
        self, mask: ApertureMask, cfg: OpticalConfig, r_max: float
    ) -> None:
        """Refuse grids that do not cover the mask or would alias at r_max."""
        rs = support_radius(mask)
        if self.half_extent < rs:
            raise ResolutionError(
                f"half_extent {self.half_extent:g} m does not cover the mask "
                f"support radius {rs:g} m"
            )
        if r_max > 0:
            bound = cfg.wavelength * cfg.focal_length / (4.0 * r_max)
            if self.step > bound:
                raise ResolutionError(
                    f"grid step {self.step:.3e} m exceeds the phase-sampling "
                    f"bound {bound:.3e} m for detector radius {r_max:.3e} m; "
                    f"increase samples_per_axis to avoid aliasing"
                )

    @staticmethod
    def for_scan(
        mask: ApertureMask,
        cfg: OpticalConfig,
        r_max: float,
        oversampling: float = 8.0,
        margin: float = 1.02,
    ) -> "QuadratureSpec":
        """Grid covering the mask with ``oversampling`` times the minimal
        sample density required by the phase-sampling bound at r_max."""
        if r_max <= 0:
            raise DomainError("r_max must be positive")
        half = margin * support_radius(mask)
        bound = cfg.wavelength * cfg.focal_length / (4.0 * r_max)
        n = max(2, math.ceil(oversampling * 2.0 * half / bound))
        return QuadratureSpec(half_extent=half, samples_per_axis=n)


@dataclass(frozen=True, eq=False)
class CoincidenceMap:
    """Coincidence rate sampled on a stated slice through (r1, r2) space,
    normalized to maximum 1 at the recorded peak."""

    positions: np.ndarray
    values: np.ndarray
    slice_descriptor: str
    peak_position: float
    peak_rate: float  # raw (unnormalized) rate at the peak

    def __post_init__(self):
        val = np.asarray(self.values, dtype=float)
        if np.any(val < 0):
            raise DomainError("coincidence values must be nonnegative")
        if abs(val.max() - 1.0) > 1e-12:
            raise DomainError("normalized slice must have maximum 1")
        object.__setattr__(self, "values", val)
        object.__setattr__(
            self, "positions", np.asarray(self.positions, dtype=float)
        )


def _grid_arrays(mask: ApertureMask, quad: QuadratureSpec):
    """Midpoint centers, mask matrix indexed [y, x], and the cell area."""
    c = quad.centers()
    mask_m = transmittance_grid(mask, c[None, :], c[:, None]).astype(float)
    return c, mask_m, quad.step * quad.step


def _kernel_prefactor(cfg: OpticalConfig) -> complex:
    lam_f = cfg.wavelength * cfg.focal_length
    return cmath.exp(4j * math.pi * cfg.focal_length / cfg.wavelength) / (1j * lam_f)


def _ideal_amplitude_on_grid(
    r1: TransverseVector,
    r2: TransverseVector,
    cfg: OpticalConfig,
    centers: np.ndarray,
    mask_m: np.ndarray,
    cell_area: float,
) -> complex:
    # h(r1, r0) h(r2, r0) = pref^2 exp(-i q_scale (r1 + r2) . r0); the phase
    # separates along the grid axes, so the 2D sum is a bilinear form.
    qx = cfg.q_scale * (r1.x + r2.x)
    qy = cfg.q_scale * (r1.y + r2.y)
    ex = np.exp(-1j * qx * centers)
    ey = np.exp(-1j * qy * centers)
    pref = _kernel_prefactor(cfg)
    return complex(pref * pref * cell_area * (ey @ mask_m @ ex))


def biphoton_amplitude_ideal(
    r1: TransverseVector,
    r2: TransverseVector,
    mask: ApertureMask,
    cfg: OpticalConfig,
    quad: QuadratureSpec,
) -> complex:
    """Joint detection amplitude for the delta-correlated source:
    midpoint quadrature of ``P(r0) h(r1, r0) h(r2, r0)`` over the mask.

    Up to the constant kernel prefactor this equals the mask transform at
    ``q = q_scale * (r1 + r2)``.

    Raises
    ------
    ResolutionError
        If the grid violates the phase-sampling bound at max(|r1|, |r2|)
        or does not cover the mask support.
    """
    quad.require_valid(mask, cfg, max(r1.norm(), r2.norm()))
    centers, mask_m, cell_area = _grid_arrays(mask, quad)
    return _ideal_amplitude_on_grid(r1, r2, cfg, centers, mask_m, cell_area)


def _correlation_axis_matrix(
    centers: np.ndarray, source: GaussianCorrelated
) -> np.ndarray:
    # The Gaussian correlation separates per axis:
    # C(r', r'') = K(x', x'') K(y', y'') with
    # K(u, v) = exp(-(u-v)^2/(2 s_c^2) - (u+v)^2/(8 s_b^2)), bounded by 1.
    diff = centers[:, None] - centers[None, :]
    summ = centers[:, None] + centers[None, :]
    sc, sb = source.correlation_width, source.beam_width
    return np.exp(-diff * diff / (2.0 * sc * sc) - summ * summ / (8.0 * sb * sb))


def biphoton_amplitude_general(
    r1: TransverseVector,
    r2: TransverseVector,
    mask: ApertureMask,
    source: GaussianCorrelated,
    cfg: OpticalConfig,
    quad: QuadratureSpec,
    cost_budget: int = DEFAULT_COST_BUDGET,
) -> complex:
    """Joint detection amplitude for the Gaussian-correlated source: 4D
    midpoint quadrature over both source coordinates (mask applied at
    each), contracted axis by axis using the separability of the
    correlation.  Converges to the ideal-source result, up to overall
    normalization, as correlation_width -> 0 and beam_width -> infinity.

    Raises
    ------
    CostBudgetError
        If ``samples_per_axis**4`` exceeds ``cost_budget``.
    ResolutionError
        As for the ideal amplitude.
    """
    if isinstance(source, IdealDelta):
        raise DomainError(
            "use biphoton_amplitude_ideal for the delta-correlated source"
        )
    evaluations = quad.samples_per_axis**4
    if evaluations > cost_budget:
        raise CostBudgetError(
            f"4D quadrature needs {evaluations:.2e} evaluations, "
            f"budget is {cost_budget:.2e}"
        )
    quad.require_valid(mask, cfg, max(r1.norm(), r2.norm()))
    centers, mask_m, cell_area = _grid_arrays(mask, quad)
    qsc = cfg.q_scale
    # U, V indexed [x, y]; the contraction is
    # amp = sum_{x',y',x'',y''} U[x',y'] K[x',x''] K[y',y''] V[x'',y'']
    #     = sum(K * (U K V^T))  elementwise in (x', x'').
    ex1 = np.exp(-1j * qsc * r1.x * centers)
    ey1 = np.exp(-1j * qsc * r1.y * centers)
    ex2 = np.exp(-1j * qsc * r2.x * centers)
    ey2 = np.exp(-1j * qsc * r2.y * centers)
    u = mask_m.T * ex1[:, None] * ey1[None, :]
    v = mask_m.T * ex2[:, None] * ey2[None, :]
    k = _correlation_axis_matrix(centers, source)
    pref = _kernel_prefactor(cfg)
    total = np.sum(k * (u @ k @ v.T))
    return complex(pref * pref * cell_area * cell_area * total)


def coincidence_rate(
    r1: TransverseVector,
    r2: TransverseVector,
    mask: ApertureMask,
    cfg: OpticalConfig,
    quad: QuadratureSpec,
    source: BiphotonSource = IDEAL_DELTA,
    cost_budget: int = DEFAULT_COST_BUDGET,
) -> float:
    """Coincidence counting rate: squared modulus of the joint amplitude
    for the selected source model.  Arbitrary overall scale, never
    negative."""
    if isinstance(source, IdealDelta):
        amp = biphoton_amplitude_ideal(r1, r2, mask, cfg, quad)
    else:
        amp = biphoton_amplitude_general(
            r1, r2, mask, source, cfg, quad, cost_budget
        )
    return abs(amp) ** 2


def degenerate_profile(
    mask: ApertureMask,
    cfg: OpticalConfig,
    radii,
    quad: QuadratureSpec,
    source: BiphotonSource = IDEAL_DELTA,
    cost_budget: int = DEFAULT_COST_BUDGET,
) -> ScanProfile:
    """Normalized coincidence profile along the degenerate radial cut
    r1 = r2 = (r, 0): returns R(r)/R(0), so a leading radius 0 samples
    exactly 1.

    The quadrature grid and mask matrix are built once and reused for
    every radius; each sample is the same midpoint sum the pointwise
    amplitude operations perform.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 2:
        raise DomainError("radii must be a 1D collection with at least two entries")
    if not np.all(np.isfinite(radii)):
        raise DomainError("radii must be finite")
    r_max = float(np.max(np.abs(radii)))
    quad.require_valid(mask, cfg, r_max)
    origin = TransverseVector(0.0, 0.0)

    if isinstance(source, IdealDelta):
        centers, mask_m, cell_area = _grid_arrays(mask, quad)
        col_sums = mask_m.sum(axis=0)  # phase is constant along y on this cut
        pref = _kernel_prefactor(cfg)

        def rate(r: float) -> float:
            ex = np.exp(-1j * (cfg.q_scale * 2.0 * r) * centers)
            amp = pref * pref * cell_area * (col_sums @ ex)
            return abs(amp) ** 2

        values = np.array([rate(r) for r in radii])
        reference = rate(0.0)
    else:
        def rate_general(r: float) -> float:
            point = TransverseVector(r, 0.0)
            return coincidence_rate(
                point, point, mask, cfg, quad, source, cost_budget
            )

        values = np.array([rate_general(r) for r in radii])
        reference = coincidence_rate(
            origin, origin, mask, cfg, quad, source, cost_budget
        )

    if reference <= 0:
        raise DomainError("R(0) vanished; cannot normalize the profile")
    return ScanProfile(
        positions=radii,
        values=values / reference,
        normalization=Normalization.PEAK_NORMALIZED,
    )


def coincidence_map(
    mask: ApertureMask,
    cfg: OpticalConfig,
    positions,
    quad: QuadratureSpec,
    fixed_r2: Optional[TransverseVector] = None,
    source: BiphotonSource = IDEAL_DELTA,
    cost_budget: int = DEFAULT_COST_BUDGET,
) -> CoincidenceMap:
    """Coincidence rate along a 1D slice: the degenerate cut
    r1 = r2 = (p, 0) by default, or r1 = (p, 0) with r2 held fixed.
    Values are normalized to the slice maximum."""
    positions = np.asarray(positions, dtype=float)
    rates = []
    for p in positions:
        r1 = TransverseVector(float(p), 0.0)
        r2 = r1 if fixed_r2 is None else fixed_r2
        rates.append(
            coincidence_rate(r1, r2, mask, cfg, quad, source, cost_budget)
        )
    rates = np.asarray(rates)
    peak_idx = int(np.argmax(rates))
    peak = rates[peak_idx]
    if peak <= 0:
        raise DomainError("slice maximum vanished; cannot normalize")
    descriptor = (
        "degenerate: r1 = r2 = (p, 0)"
        if fixed_r2 is None
        else f"fixed partner: r1 = (p, 0), r2 = ({fixed_r2.x:g}, {fixed_r2.y:g})"
    )
    return CoincidenceMap(
        positions=positions,
        values=rates / peak,
        slice_descriptor=descriptor,
        peak_position=float(positions[peak_idx]),
        peak_rate=float(peak),
    )


def mask_fourier_numeric(
    mask: ApertureMask, q: TransverseVector, quad: QuadratureSpec
) -> complex:
    """Midpoint-quadrature Fourier transform of any mask (including pixel
    grids) at frequency q, without the kernel prefactor.  The caller is
    responsible for choosing a grid fine enough for the largest |q|; the
    analytic-shape transforms in :mod:`biphoton_airy.masks` are the
    closed-form counterpart."""
    centers = quad.centers()
    mask_m = transmittance_grid(mask, centers[None, :], centers[:, None]).astype(float)
    ex = np.exp(-1j * q.x * centers)
    ey = np.exp(-1j * q.y * centers)
    return complex(quad.step * quad.step * (ey @ mask_m @ ex))
