"""Two-photon Fraunhofer diffraction through a lens.

A photon pair created at the same transverse point and diffracted by a
masked aperture produces a coincidence pattern equal to the squared mask
spectrum evaluated at the *sum* of the detector coordinates.  On the
degenerate cut (both detectors together) every spatial frequency doubles,
so a circular aperture yields an Airy disk with half the classical spot
size.  This package computes the patterns (closed form and quadrature),
emulates the scanning coincidence measurement with Poisson statistics,
and fits the results.
"""

from .core import OpticalConfig, TransverseVector, lens_kernel
from .errors import (
    ConfigError,
    CostBudgetError,
    DomainError,
    FeatureNotFoundError,
    FitConvergenceError,
    InvalidMetricsError,
    ResolutionError,
    UnsupportedShapeError,
)
from .special import airy_kernel, bessel_j1
from .masks import (
    ApertureMask,
    Circle,
    DoubleSlit,
    PixelGrid,
    Rectangle,
    fourier_analytic,
    load_pixel_grid,
    rasterize_circle,
    save_pixel_grid,
    support_radius,
    transmittance,
    transmittance_grid,
)
from .biphoton import (
    BiphotonSource,
    CoincidenceMap,
    GaussianCorrelated,
    IDEAL_DELTA,
    IdealDelta,
    QuadratureSpec,
    biphoton_amplitude_general,
    biphoton_amplitude_ideal,
    coincidence_map,
    coincidence_rate,
    degenerate_profile,
    mask_fourier_numeric,
)
from .analytic import (
    Normalization,
    PatternMetrics,
    ScanProfile,
    classical_airy_function,
    classical_airy_profile,
    doubleslit_fringe_profiles,
    first_zero,
    fringe_period,
    fwhm,
    pattern_metrics,
    quantum_airy_function,
    quantum_airy_profile,
    resolution_ratio,
)
from .experiment import (
    CountRecord,
    DetectorModel,
    FitPattern,
    FitResult,
    J1_FIRST_ROOT,
    expected_counts,
    fit_profile,
    poisson_sample,
    records_to_profile,
    scan_positions_from_mirror,
    simulate_scan,
)
from .config import RunConfig, ScanRange, load_config, parse_config, render_config

__version__ = "0.1.0"
