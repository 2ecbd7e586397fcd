"""Line-oriented run configuration with explicit SI-unit suffixes.

Format: one ``section.key = value`` assignment per line; blank lines and
lines starting with ``#`` are ignored.  Dimensioned values require a
unit suffix (lengths: nm, um, mm, cm, m; times: ns, s), so mixed-unit
parameter sets can be transcribed without silent scale mistakes:

    optical.wavelength = 800nm
    optical.focal_length = 50cm
    mask.circle.diameter = 0.9mm
    scan.r_min = 0m
    scan.r_max = 1.5mm
    scan.step = 7.5um

``parse_config`` validates every invariant and reports problems with the
offending key path; ``render_config`` writes a document (SI base units)
that parses back to an equal configuration.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .biphoton import (
    BiphotonSource,
    GaussianCorrelated,
    IDEAL_DELTA,
    QuadratureSpec,
)
from .core import OpticalConfig
from .errors import ConfigError, DomainError
from .masks import (
    ApertureMask,
    Circle,
    DoubleSlit,
    PixelGrid,
    Rectangle,
    load_pixel_grid,
)
from .experiment import DetectorModel, FitPattern

__all__ = ["ScanRange", "RunConfig", "parse_config", "render_config", "load_config"]

_LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0}
_TIME_UNITS = {"ns": 1e-9, "s": 1.0}

_VALUE_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([a-zA-Z]*)$")


@dataclass(frozen=True)
class ScanRange:
    """Detector positions r_min, r_min + step, ... up to r_max."""

    r_min: float
    r_max: float
    step: float

    def __post_init__(self):
        if not all(
            math.isfinite(v) for v in (self.r_min, self.r_max, self.step)
        ):
            raise DomainError("scan range values must be finite")
        if self.r_min >= self.r_max:
            raise DomainError("r_min must be smaller than r_max")
        if self.step <= 0:
            raise DomainError("step must be positive")

    def positions(self) -> np.ndarray:
        count = int(math.floor((self.r_max - self.r_min) / self.step + 1e-9)) + 1
        return self.r_min + self.step * np.arange(count)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration shared by all CLI workflows."""

    optical: OpticalConfig
    mask: ApertureMask
    scan: ScanRange
    source: BiphotonSource = IDEAL_DELTA
    quad: Optional[QuadratureSpec] = None
    detector: Optional[DetectorModel] = None
    pattern: FitPattern = FitPattern.QUANTUM_AIRY
    rms_tolerance: float = 1e-3
    reference_circle_radius: Optional[float] = None
    pixel_grid_path: Optional[str] = None
    output_path: Optional[str] = None


def _parse_number(key: str, raw: str, units: Optional[dict], kind: str) -> float:
    match = _VALUE_RE.match(raw.strip())
    if not match:
        raise ConfigError(key, f"cannot parse value {raw!r}")
    number, suffix = match.groups()
    value = float(number)
    if units is None:
        if suffix:
            raise ConfigError(
                key, f"dimensionless value must not carry a unit suffix ({suffix!r})"
            )
        return value
    if not suffix:
        raise ConfigError(key, f"missing {kind} unit suffix on {raw!r}")
    if suffix not in units:
        known = ", ".join(sorted(units))
        raise ConfigError(key, f"{suffix!r} is not a {kind} unit (expected {known})")
    return value * units[suffix]


def _parse_length(key: str, raw: str) -> float:
    return _parse_number(key, raw, _LENGTH_UNITS, "length")


def _parse_time(key: str, raw: str) -> float:
    return _parse_number(key, raw, _TIME_UNITS, "time")


def _parse_plain(key: str, raw: str) -> float:
    return _parse_number(key, raw, None, "")


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None


_KNOWN_KEYS = {
    "optical.wavelength",
    "optical.focal_length",
    "mask.circle.radius",
    "mask.circle.diameter",
    "mask.doubleslit.slit_width",
    "mask.doubleslit.separation",
    "mask.doubleslit.height",
    "mask.rectangle.half_width_x",
    "mask.rectangle.half_width_y",
    "mask.pixelgrid.path",
    "source.model",
    "source.correlation_width",
    "source.beam_width",
    "quad.half_extent",
    "quad.samples_per_axis",
    "scan.r_min",
    "scan.r_max",
    "scan.step",
    "scan.pattern",
    "detector.pinhole_radius",
    "detector.pair_flux",
    "detector.dwell_time",
    "detector.coincidence_window",
    "detector.singles_rate",
    "detector.rng_seed",
    "compare.rms_tolerance",
    "compare.reference_circle_radius",
    "output.path",
}


def _split_lines(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(key, "unknown key")
        if key in entries:
            raise ConfigError(key, "duplicate key")
        entries[key] = value
    return entries


def _build_mask(entries: dict[str, str]) -> tuple[ApertureMask, Optional[str]]:
    groups = {
        key.split(".")[1]
        for key in entries
        if key.startswith("mask.")
    }
    if len(groups) == 0:
        raise ConfigError("mask", "missing required mask definition")
    if len(groups) > 1:
        raise ConfigError("mask", f"multiple mask shapes given: {sorted(groups)}")
    shape = groups.pop()
    try:
        if shape == "circle":
            has_r = "mask.circle.radius" in entries
            has_d = "mask.circle.diameter" in entries
            if has_r == has_d:
                raise ConfigError(
                    "mask.circle", "give exactly one of radius or diameter"
                )
            if has_r:
                radius = _parse_length("mask.circle.radius", entries["mask.circle.radius"])
            else:
                radius = 0.5 * _parse_length(
                    "mask.circle.diameter", entries["mask.circle.diameter"]
                )
            return Circle(radius=radius), None
        if shape == "doubleslit":
            return (
                DoubleSlit(
                    slit_width=_parse_length(
                        "mask.doubleslit.slit_width",
                        _require(entries, "mask.doubleslit.slit_width"),
                    ),
                    separation=_parse_length(
                        "mask.doubleslit.separation",
                        _require(entries, "mask.doubleslit.separation"),
                    ),
                    height=_parse_length(
                        "mask.doubleslit.height",
                        _require(entries, "mask.doubleslit.height"),
                    ),
                ),
                None,
            )
        if shape == "rectangle":
            return (
                Rectangle(
                    half_width_x=_parse_length(
                        "mask.rectangle.half_width_x",
                        _require(entries, "mask.rectangle.half_width_x"),
                    ),
                    half_width_y=_parse_length(
                        "mask.rectangle.half_width_y",
                        _require(entries, "mask.rectangle.half_width_y"),
                    ),
                ),
                None,
            )
        if shape == "pixelgrid":
            path = _require(entries, "mask.pixelgrid.path")
            try:
                return load_pixel_grid(path), path
            except OSError as exc:
                raise ConfigError("mask.pixelgrid.path", f"cannot read {path!r}: {exc}")
    except DomainError as exc:
        raise ConfigError(f"mask.{shape}", str(exc)) from None
    raise ConfigError("mask", f"unknown mask shape {shape!r}")


def _require(entries: dict[str, str], key: str) -> str:
    if key not in entries:
        raise ConfigError(key, "missing required key")
    return entries[key]


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration document.

    Raises
    ------
    ConfigError
        Naming the key path for unknown keys, missing required keys,
        unit-suffix mismatches, and any violated invariant.
    """
    entries = _split_lines(text)

    try:
        optical = OpticalConfig(
            wavelength=_parse_length(
                "optical.wavelength", _require(entries, "optical.wavelength")
            ),
            focal_length=_parse_length(
                "optical.focal_length", _require(entries, "optical.focal_length")
            ),
        )
    except DomainError as exc:
        raise ConfigError("optical", str(exc)) from None

    mask, grid_path = _build_mask(entries)

    try:
        scan = ScanRange(
            r_min=_parse_length("scan.r_min", _require(entries, "scan.r_min")),
            r_max=_parse_length("scan.r_max", _require(entries, "scan.r_max")),
            step=_parse_length("scan.step", _require(entries, "scan.step")),
        )
    except DomainError as exc:
        raise ConfigError("scan", str(exc)) from None

    model_name = entries.get("source.model", "ideal").strip().lower()
    if model_name == "ideal":
        source: BiphotonSource = IDEAL_DELTA
        for key in ("source.correlation_width", "source.beam_width"):
            if key in entries:
                raise ConfigError(key, "only meaningful for source.model = gaussian")
    elif model_name == "gaussian":
        try:
            source = GaussianCorrelated(
                correlation_width=_parse_length(
                    "source.correlation_width",
                    _require(entries, "source.correlation_width"),
                ),
                beam_width=_parse_length(
                    "source.beam_width", _require(entries, "source.beam_width")
                ),
            )
        except DomainError as exc:
            raise ConfigError("source", str(exc)) from None
    else:
        raise ConfigError("source.model", f"expected ideal or gaussian, got {model_name!r}")

    quad = None
    if "quad.half_extent" in entries or "quad.samples_per_axis" in entries:
        try:
            quad = QuadratureSpec(
                half_extent=_parse_length(
                    "quad.half_extent", _require(entries, "quad.half_extent")
                ),
                samples_per_axis=_parse_int(
                    "quad.samples_per_axis",
                    _require(entries, "quad.samples_per_axis"),
                ),
            )
        except DomainError as exc:
            raise ConfigError("quad", str(exc)) from None

    detector = None
    detector_keys = [k for k in entries if k.startswith("detector.")]
    if detector_keys:
        try:
            detector = DetectorModel(
                pinhole_radius=_parse_length(
                    "detector.pinhole_radius",
                    _require(entries, "detector.pinhole_radius"),
                ),
                pair_flux=_parse_plain(
                    "detector.pair_flux", _require(entries, "detector.pair_flux")
                ),
                dwell_time=_parse_time(
                    "detector.dwell_time", _require(entries, "detector.dwell_time")
                ),
                coincidence_window=_parse_time(
                    "detector.coincidence_window",
                    _require(entries, "detector.coincidence_window"),
                ),
                singles_rate=_parse_plain(
                    "detector.singles_rate",
                    _require(entries, "detector.singles_rate"),
                ),
                rng_seed=_parse_int(
                    "detector.rng_seed", _require(entries, "detector.rng_seed")
                ),
            )
        except DomainError as exc:
            raise ConfigError("detector", str(exc)) from None

    pattern_name = entries.get("scan.pattern", "quantum").strip().lower()
    try:
        pattern = FitPattern(pattern_name)
    except ValueError:
        raise ConfigError(
            "scan.pattern", f"expected classical or quantum, got {pattern_name!r}"
        ) from None

    rms_tolerance = 1e-3
    if "compare.rms_tolerance" in entries:
        rms_tolerance = _parse_plain(
            "compare.rms_tolerance", entries["compare.rms_tolerance"]
        )
        if rms_tolerance <= 0:
            raise ConfigError("compare.rms_tolerance", "must be positive")

    reference_radius = None
    if "compare.reference_circle_radius" in entries:
        reference_radius = _parse_length(
            "compare.reference_circle_radius",
            entries["compare.reference_circle_radius"],
        )
        if reference_radius <= 0:
            raise ConfigError("compare.reference_circle_radius", "must be positive")

    return RunConfig(
        optical=optical,
        mask=mask,
        scan=scan,
        source=source,
        quad=quad,
        detector=detector,
        pattern=pattern,
        rms_tolerance=rms_tolerance,
        reference_circle_radius=reference_radius,
        pixel_grid_path=grid_path,
        output_path=entries.get("output.path"),
    )


def render_config(config: RunConfig) -> str:
    """Serialize a configuration to the documented format (SI base units);
    ``parse_config(render_config(c)) == c`` for every valid ``c``."""
    lines = [
        f"optical.wavelength = {config.optical.wavelength!r}m",
        f"optical.focal_length = {config.optical.focal_length!r}m",
    ]
    mask = config.mask
    if isinstance(mask, Circle):
        lines.append(f"mask.circle.radius = {mask.radius!r}m")
    elif isinstance(mask, DoubleSlit):
        lines.append(f"mask.doubleslit.slit_width = {mask.slit_width!r}m")
        lines.append(f"mask.doubleslit.separation = {mask.separation!r}m")
        lines.append(f"mask.doubleslit.height = {mask.height!r}m")
    elif isinstance(mask, Rectangle):
        lines.append(f"mask.rectangle.half_width_x = {mask.half_width_x!r}m")
        lines.append(f"mask.rectangle.half_width_y = {mask.half_width_y!r}m")
    elif isinstance(mask, PixelGrid):
        if not config.pixel_grid_path:
            raise DomainError("pixel-grid configs need pixel_grid_path to render")
        lines.append(f"mask.pixelgrid.path = {config.pixel_grid_path}")
    else:
        raise DomainError(f"cannot render mask type {type(mask).__name__}")
    lines.append(f"scan.r_min = {config.scan.r_min!r}m")
    lines.append(f"scan.r_max = {config.scan.r_max!r}m")
    lines.append(f"scan.step = {config.scan.step!r}m")
    lines.append(f"scan.pattern = {config.pattern.value}")
    if isinstance(config.source, GaussianCorrelated):
        lines.append("source.model = gaussian")
        lines.append(
            f"source.correlation_width = {config.source.correlation_width!r}m"
        )
        lines.append(f"source.beam_width = {config.source.beam_width!r}m")
    else:
        lines.append("source.model = ideal")
    if config.quad is not None:
        lines.append(f"quad.half_extent = {config.quad.half_extent!r}m")
        lines.append(f"quad.samples_per_axis = {config.quad.samples_per_axis}")
    if config.detector is not None:
        det = config.detector
        lines.append(f"detector.pinhole_radius = {det.pinhole_radius!r}m")
        lines.append(f"detector.pair_flux = {det.pair_flux!r}")
        lines.append(f"detector.dwell_time = {det.dwell_time!r}s")
        lines.append(f"detector.coincidence_window = {det.coincidence_window!r}s")
        lines.append(f"detector.singles_rate = {det.singles_rate!r}")
        lines.append(f"detector.rng_seed = {det.rng_seed}")
    if config.rms_tolerance != 1e-3:
        lines.append(f"compare.rms_tolerance = {config.rms_tolerance!r}")
    if config.reference_circle_radius is not None:
        lines.append(
            f"compare.reference_circle_radius = {config.reference_circle_radius!r}m"
        )
    if config.output_path:
        lines.append(f"output.path = {config.output_path}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
