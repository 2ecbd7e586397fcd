import numpy as np
import pytest

from biphoton_airy import Circle, OpticalConfig, QuadratureSpec

# Reference experiment geometry: 0.9 mm diameter aperture, f = 50 cm lens,
# 800 nm light.  Derived feature sizes (from the J1-root oracle):
# classical first zero 542.0755 um, coincidence first zero 271.0378 um.
APERTURE_RADIUS = 0.45e-3
WAVELENGTH = 800e-9
FOCAL_LENGTH = 0.5

CLASSICAL_FIRST_ZERO = 5.420755072295576e-4
QUANTUM_FIRST_ZERO = 2.710377536147788e-4
CLASSICAL_FWHM = 4.5733065331652803e-4
QUANTUM_FWHM = 2.2866532665826402e-4


@pytest.fixture(scope="session")
def cfg() -> OpticalConfig:
    return OpticalConfig(wavelength=WAVELENGTH, focal_length=FOCAL_LENGTH)


@pytest.fixture(scope="session")
def circle() -> Circle:
    return Circle(radius=APERTURE_RADIUS)


@pytest.fixture(scope="session")
def quad() -> QuadratureSpec:
    # covers the aperture with ~1.8 um cells: far inside the sampling bound
    # for detector radii up to 1.5 mm, and accurate to ~1e-5 RMS
    return QuadratureSpec(half_extent=1.02 * APERTURE_RADIUS, samples_per_axis=512)


@pytest.fixture(scope="session")
def scan_radii() -> np.ndarray:
    return np.linspace(0.0, 1.5e-3, 201)
