"""Monte Carlo emulation of the scanning coincidence measurement.

A two-photon detector (pinhole + coincidence circuit) is stepped across
the back focal plane; at each position it integrates for a dwell time
and reports a Poisson-distributed coincidence count whose mean is the
pattern averaged over the pinhole, scaled by the detected pair flux,
plus accidental coincidences from uncorrelated singles.  A damped
Gauss-Newton fitter then recovers the pattern parameters from the
counts, the same way a measured curve is overlaid with theory.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analytic import Normalization, ScanProfile
from .core import OpticalConfig
from .errors import DomainError, FitConvergenceError
from .special import airy_kernel

__all__ = [
    "DetectorModel",
    "CountRecord",
    "FitResult",
    "FitPattern",
    "J1_FIRST_ROOT",
    "poisson_sample",
    "expected_counts",
    "simulate_scan",
    "fit_profile",
    "scan_positions_from_mirror",
    "records_to_profile",
]

# First positive root of J1, located by bisection on the ascending series.
J1_FIRST_ROOT = 3.8317059702075125

_NORMAL_APPROX_CUTOFF = 500.0
_PINHOLE_SAMPLES = 15  # midpoint cells per axis across the pinhole


@dataclass(frozen=True)
class DetectorModel:
    """Scanning two-photon detector parameters.

    pair_flux is the detected pair rate at the pattern peak after all
    losses; singles_rate enters only through the accidental-coincidence
    estimate ``singles_rate**2 * coincidence_window * dwell_time``.
    """

    pinhole_radius: float
    pair_flux: float
    dwell_time: float
    coincidence_window: float
    singles_rate: float
    rng_seed: int

    def __post_init__(self):
        for name in ("pinhole_radius", "dwell_time", "coincidence_window"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive")
        for name in ("pair_flux", "singles_rate"):  # zero = source/detector off
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be finite and nonnegative")
        if self.coincidence_window >= 0.01 * self.dwell_time:
            raise DomainError("coincidence_window must be far smaller than dwell_time")
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise DomainError("rng_seed must be a nonnegative integer")

    @property
    def accidentals_per_dwell(self) -> float:
        return self.singles_rate**2 * self.coincidence_window * self.dwell_time


@dataclass(frozen=True)
class CountRecord:
    """One scan position: the Poisson draw alongside its mean."""

    position: float
    coincidences: int
    expected: float
    accidental_estimate: float

    def __post_init__(self):
        if self.coincidences < 0:
            raise DomainError("coincidences must be nonnegative")


class FitPattern(enum.Enum):
    CLASSICAL_AIRY = "classical"
    QUANTUM_AIRY = "quantum"

    @property
    def aperture_factor(self) -> float:
        return 1.0 if self is FitPattern.CLASSICAL_AIRY else 2.0


@dataclass(frozen=True, eq=False)
class FitResult:
    """Weighted least-squares solution for amplitude, center offset, and
    flat background, with the first-zero radius mapped from the fitted
    center and the known geometry."""

    amplitude: float
    center_offset: float
    background: float
    first_zero_estimate: float
    covariance: np.ndarray
    reduced_chi_square: float
    iterations: int

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (3, 3):
            raise DomainError("covariance must be 3x3")
        if not np.allclose(cov, cov.T, rtol=1e-8, atol=0.0):
            raise DomainError("covariance must be symmetric")
        if self.reduced_chi_square < 0:
            raise DomainError("reduced chi-square must be nonnegative")
        object.__setattr__(self, "covariance", cov)

    @property
    def amplitude_sigma(self) -> float:
        return float(np.sqrt(self.covariance[0, 0]))

    @property
    def center_sigma(self) -> float:
        return float(np.sqrt(self.covariance[1, 1]))

    @property
    def background_sigma(self) -> float:
        return float(np.sqrt(self.covariance[2, 2]))

    @property
    def first_zero_sigma(self) -> float:
        # the zero is the center plus a fixed geometric offset
        return self.center_sigma


def poisson_sample(rng: np.random.Generator, mean: float) -> int:
    """One Poisson draw: inversion by sequential search for small means,
    rounded normal approximation above the cutoff (mean > 500)."""
    if mean < 0 or not math.isfinite(mean):
        raise DomainError("Poisson mean must be finite and nonnegative")
    if mean == 0.0:
        return 0
    if mean > _NORMAL_APPROX_CUTOFF:
        draw = mean + math.sqrt(mean) * rng.standard_normal()
        return max(0, int(round(draw)))
    u = rng.random()
    prob = math.exp(-mean)
    cumulative = prob
    k = 0
    limit = int(mean + 40.0 * math.sqrt(mean) + 50.0)
    while u > cumulative and k < limit:
        k += 1
        prob *= mean / k
        cumulative += prob
    return k


def _pinhole_offsets(radius: float) -> tuple[np.ndarray, np.ndarray]:
    c = (np.arange(_PINHOLE_SAMPLES) + 0.5) * (
        2.0 * radius / _PINHOLE_SAMPLES
    ) - radius
    xx, yy = np.meshgrid(c, c)
    keep = xx * xx + yy * yy <= radius * radius
    return xx[keep], yy[keep]


def _pinhole_average(
    position: float, radius: float, profile_fn: Callable[[float], float]
) -> float:
    ox, oy = _pinhole_offsets(radius)
    r = np.hypot(position + ox, oy)
    try:  # vectorized profile functions evaluate the whole disk at once
        values = np.asarray(profile_fn(r), dtype=float)
        if values.shape != r.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([profile_fn(float(v)) for v in r])
    return float(values.mean())


def expected_counts(
    position: float,
    model: DetectorModel,
    profile_fn: Callable[[float], float],
    background: float = 0.0,
) -> float:
    """Mean coincidence count at a scan position:

    ``pair_flux * dwell_time * <profile over the pinhole disk>``
    plus accidentals ``singles_rate^2 * coincidence_window * dwell_time``
    plus any extra flat background rate (counts/s) times the dwell time.

    ``profile_fn`` maps a radial detector distance to the peak-normalized
    pattern value; the pinhole average is a midpoint quadrature over the
    disk around the scan position.
    """
    if background < 0:
        raise DomainError("background rate must be nonnegative")
    signal = (
        model.pair_flux
        * model.dwell_time
        * _pinhole_average(position, model.pinhole_radius, profile_fn)
    )
    return signal + model.accidentals_per_dwell + background * model.dwell_time


def simulate_scan(
    positions: Sequence[float],
    model: DetectorModel,
    profile_fn: Callable[[float], float],
    background: float = 0.0,
) -> list[CountRecord]:
    """Simulate one detector scan: a Poisson draw per position.

    Deterministic for a given ``model.rng_seed``; positions are processed
    in order and consume the generator stream sequentially, which is part
    of the determinism contract.
    """
    rng = np.random.default_rng(model.rng_seed)
    records = []
    for position in positions:
        mean = expected_counts(float(position), model, profile_fn, background)
        draw = poisson_sample(rng, mean)
        records.append(
            CountRecord(
                position=float(position),
                coincidences=draw,
                expected=mean,
                accidental_estimate=model.accidentals_per_dwell,
            )
        )
    return records


def records_to_profile(records: Sequence[CountRecord]) -> ScanProfile:
    """Raw-count profile from scan records, with sqrt(N) uncertainties."""
    ordered = sorted(records, key=lambda rec: rec.position)
    counts = np.array([rec.coincidences for rec in ordered], dtype=float)
    return ScanProfile(
        positions=np.array([rec.position for rec in ordered]),
        values=counts,
        normalization=Normalization.RAW_COUNTS,
        uncertainties=np.sqrt(np.maximum(counts, 1.0)),
    )


def _fit_model(
    params: np.ndarray, x: np.ndarray, scale: float
) -> np.ndarray:
    amplitude, center, background = params
    return amplitude * airy_kernel(scale * (x - center)) + background


def fit_profile(
    records: Sequence[CountRecord],
    a: float,
    cfg: OpticalConfig,
    pattern: FitPattern,
    max_iterations: int = 100,
) -> FitResult:
    """Weighted least squares of ``A * airy_kernel(scale (x - rc)) + B``
    against the recorded counts, weights ``1 / max(count, 1)`` (Poisson
    variance).  Damped Gauss-Newton steps with an analytic Jacobian in A
    and B and a central finite difference in the center offset.

    Raises
    ------
    FitConvergenceError
        If no damping produces a decrease within ``max_iterations``;
        carries the last iterate.
    """
    if len(records) < 10:
        raise DomainError("need at least 10 records to fit")
    x = np.array([rec.position for rec in records], dtype=float)
    y = np.array([rec.coincidences for rec in records], dtype=float)
    scale = cfg.q_scale * pattern.aperture_factor * a
    zero_offset = J1_FIRST_ROOT / scale
    peak_guess = float(x[int(np.argmax(y))])
    if max(x.max() - peak_guess, peak_guess - x.min()) < zero_offset:
        raise DomainError("records must span past the first zero of the pattern")

    weights = 1.0 / np.maximum(y, 1.0)
    params = np.array([max(y.max() - y.min(), 1.0), peak_guess, max(y.min(), 0.0)])
    step_h = 1e-4 * zero_offset

    def chi_square(p: np.ndarray) -> float:
        resid = y - _fit_model(p, x, scale)
        return float(np.sum(weights * resid * resid))

    def jacobian(p: np.ndarray) -> np.ndarray:
        col_a = airy_kernel(scale * (x - p[1]))
        plus = _fit_model(np.array([p[0], p[1] + step_h, p[2]]), x, scale)
        minus = _fit_model(np.array([p[0], p[1] - step_h, p[2]]), x, scale)
        col_c = (plus - minus) / (2.0 * step_h)
        return np.stack([col_a, col_c, np.ones_like(x)], axis=1)

    chi2 = chi_square(params)
    damping = None
    converged = False
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        jac = jacobian(params)
        resid = y - _fit_model(params, x, scale)
        jtwj = jac.T @ (weights[:, None] * jac)
        gradient = jac.T @ (weights * resid)
        grad_scale = float(np.max(np.abs(gradient)))
        if grad_scale <= 1e-12 * (1.0 + chi2):
            converged = True
            break
        if damping is None:
            damping = 1e-3 * float(np.max(np.diag(jtwj)))
        stepped = False
        for _ in range(60):
            try:
                delta = np.linalg.solve(jtwj + damping * np.eye(3), gradient)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            trial = params + delta
            trial_chi2 = chi_square(trial)
            if trial_chi2 <= chi2:
                decrease = chi2 - trial_chi2
                params, chi2 = trial, trial_chi2
                damping = max(damping / 3.0, 1e-14)
                stepped = True
                break
            damping *= 2.0
        if not stepped:
            # cannot decrease further: converged if the gradient is tiny
            if grad_scale <= 1e-6 * (1.0 + chi2):
                converged = True
                break
            raise FitConvergenceError(
                "damped Gauss-Newton failed to find a descent step",
                params=params.copy(),
                chi_square=chi2,
                iterations=iteration,
            )
        if decrease <= 1e-10 * (chi2 + 1e-30):
            converged = True
            break
    if not converged and iteration >= max_iterations:
        raise FitConvergenceError(
            f"no convergence after {max_iterations} iterations",
            params=params.copy(),
            chi_square=chi2,
            iterations=iteration,
        )

    jac = jacobian(params)
    jtwj = jac.T @ (weights[:, None] * jac)
    covariance = np.linalg.inv(jtwj)
    covariance = 0.5 * (covariance + covariance.T)  # exact symmetry
    dof = max(len(records) - 3, 1)
    return FitResult(
        amplitude=float(params[0]),
        center_offset=float(params[1]),
        background=float(params[2]),
        first_zero_estimate=float(params[1] + zero_offset),
        covariance=covariance,
        reduced_chi_square=chi2 / dof,
        iterations=iteration,
    )


def scan_positions_from_mirror(
    angles: Sequence[float], lever_arm: float
) -> list[float]:
    """Detector-plane positions swept by rotating the scan mirror:
    a rotation by theta deflects the beam by 2 theta, so the position is
    ``2 * theta * lever_arm`` in the small-angle regime (|theta| < 0.05 rad)."""
    if not (math.isfinite(lever_arm) and lever_arm > 0):
        raise DomainError("lever_arm must be finite and positive")
    out = []
    for theta in angles:
        if not math.isfinite(theta) or abs(theta) >= 0.05:
            raise DomainError(f"angle {theta!r} outside the small-angle domain")
        out.append(2.0 * float(theta) * lever_arm)
    return out
