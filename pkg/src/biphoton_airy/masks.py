"""Binary aperture masks: analytic shapes, pixel grids, Fourier transforms.

A mask is a binary transmittance P(r) in the source plane: 1 inside the
transparent region, 0 outside, so that P**2 == P pointwise.  Analytic
shapes (circle, double slit, rectangle) carry closed-form Fourier
transforms; arbitrary shapes can be loaded as pixel grids and
transformed numerically (see :mod:`biphoton_airy.biphoton`).

Transform convention: ``F(q) = integral P(r) exp(-i q . r) d^2 r`` with
q in rad/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import TransverseVector
from .errors import DomainError, UnsupportedShapeError

__all__ = [
    "Circle",
    "DoubleSlit",
    "Rectangle",
    "PixelGrid",
    "ApertureMask",
    "transmittance",
    "transmittance_grid",
    "fourier_analytic",
    "support_radius",
    "parse_pixel_grid",
    "format_pixel_grid",
    "load_pixel_grid",
    "save_pixel_grid",
    "rasterize_circle",
]


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and positive")


@dataclass(frozen=True)
class Circle:
    """Transparent disk of the given radius, centered on the axis."""

    radius: float

    def __post_init__(self):
        _require_positive("radius", self.radius)


@dataclass(frozen=True)
class DoubleSlit:
    """Two vertical slits of width ``slit_width`` whose centers are
    ``separation`` apart along x, each of height ``height`` along y.
    Slits must not overlap (separation > slit_width)."""

    slit_width: float
    separation: float
    height: float

    def __post_init__(self):
        _require_positive("slit_width", self.slit_width)
        _require_positive("separation", self.separation)
        _require_positive("height", self.height)
        if self.separation <= self.slit_width:
            raise DomainError("slit separation must exceed slit width")


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned transparent rectangle given by its half widths."""

    half_width_x: float
    half_width_y: float

    def __post_init__(self):
        _require_positive("half_width_x", self.half_width_x)
        _require_positive("half_width_y", self.half_width_y)


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """Binary pixel raster with square pixels of side ``pitch``.

    ``origin`` is the lower-left corner of the raster; the cell at
    column j, bottom-row i covers
    ``[origin_x + j*pitch, origin_x + (j+1)*pitch) x [origin_y + i*pitch, ...)``.
    ``cells`` is indexed [row_from_bottom, column] with values 0/1.
    Lookup is nearest-pixel (the cell containing the point); no
    interpolation, so transmittance stays binary.
    """

    origin_x: float
    origin_y: float
    pitch: float
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        _require_positive("pitch", self.pitch)
        if not (math.isfinite(self.origin_x) and math.isfinite(self.origin_y)):
            raise DomainError("origin must be finite")
        arr = np.asarray(self.cells, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("cells must be a non-empty 2D array")
        if not np.all((arr == 0) | (arr == 1)):
            raise DomainError("cells must be binary (0/1)")
        object.__setattr__(self, "cells", arr)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelGrid):
            return NotImplemented
        return (
            self.origin_x == other.origin_x
            and self.origin_y == other.origin_y
            and self.pitch == other.pitch
            and self.cells.shape == other.cells.shape
            and bool(np.all(self.cells == other.cells))
        )


ApertureMask = Union[Circle, DoubleSlit, Rectangle, PixelGrid]


def transmittance(mask: ApertureMask, r0: TransverseVector) -> int:
    """Binary transmittance P(r0): 1 inside the transparent region, else 0."""
    return int(transmittance_grid(mask, np.float64(r0.x), np.float64(r0.y)))


def transmittance_grid(mask: ApertureMask, x, y):
    """Vectorized transmittance over broadcastable coordinate arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(mask, Circle):
        return (x * x + y * y <= mask.radius * mask.radius).astype(np.uint8)
    if isinstance(mask, DoubleSlit):
        half_w = 0.5 * mask.slit_width
        half_d = 0.5 * mask.separation
        in_y = np.abs(y) <= 0.5 * mask.height
        in_x = (np.abs(x - half_d) <= half_w) | (np.abs(x + half_d) <= half_w)
        return (in_x & in_y).astype(np.uint8)
    if isinstance(mask, Rectangle):
        inside = (np.abs(x) <= mask.half_width_x) & (np.abs(y) <= mask.half_width_y)
        return inside.astype(np.uint8)
    if isinstance(mask, PixelGrid):
        xb, yb = np.broadcast_arrays(x, y)
        col = np.floor((xb - mask.origin_x) / mask.pitch).astype(np.int64)
        row = np.floor((yb - mask.origin_y) / mask.pitch).astype(np.int64)
        valid = (col >= 0) & (col < mask.width) & (row >= 0) & (row < mask.height)
        out = np.zeros(xb.shape, dtype=np.uint8)
        out[valid] = mask.cells[row[valid], col[valid]]
        return out
    raise TypeError(f"unknown mask type {type(mask).__name__}")


def _sinc(t):
    """sin(t)/t with the t = 0 limit 1 (unnormalized sinc)."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    nz = t != 0.0
    out[nz] = np.sin(t[nz]) / t[nz]
    return out if out.ndim else float(out)


def fourier_analytic(mask: ApertureMask, q: TransverseVector) -> complex:
    """Closed-form Fourier transform of an analytic mask at frequency q.

    Circle of radius a: ``2 pi a J1(|q| a) / |q|`` with limit ``pi a^2``
    at q = 0.  DoubleSlit: slit-width and height sinc factors times the
    two-slit fringe factor ``2 cos(q_x d / 2)``.  Rectangle: product of
    sinc factors.  Pixel grids have no closed form and are rejected.
    """
    from .special import bessel_j1

    qx, qy = q.x, q.y
    if isinstance(mask, Circle):
        a = mask.radius
        qn = math.hypot(qx, qy)
        if qn == 0.0:
            return complex(math.pi * a * a)
        return complex(2.0 * math.pi * a * bessel_j1(qn * a) / qn)
    if isinstance(mask, DoubleSlit):
        w, d, h = mask.slit_width, mask.separation, mask.height
        envelope = w * _sinc(0.5 * qx * w) * h * _sinc(0.5 * qy * h)
        return complex(envelope * 2.0 * math.cos(0.5 * qx * d))
    if isinstance(mask, Rectangle):
        hx, hy = mask.half_width_x, mask.half_width_y
        return complex(4.0 * hx * hy * _sinc(qx * hx) * _sinc(qy * hy))
    if isinstance(mask, PixelGrid):
        raise UnsupportedShapeError(
            "pixel grids have no closed-form transform; use the numeric path"
        )
    raise TypeError(f"unknown mask type {type(mask).__name__}")


def support_radius(mask: ApertureMask) -> float:
    """Radius of a disk centered on the axis containing all transparent points."""
    if isinstance(mask, Circle):
        return mask.radius
    if isinstance(mask, DoubleSlit):
        return math.hypot(
            0.5 * mask.separation + 0.5 * mask.slit_width, 0.5 * mask.height
        )
    if isinstance(mask, Rectangle):
        return math.hypot(mask.half_width_x, mask.half_width_y)
    if isinstance(mask, PixelGrid):
        rows, cols = np.nonzero(mask.cells)
        if rows.size == 0:
            return 0.0
        # farthest corner of any transparent cell
        xs = mask.origin_x + np.stack([cols, cols + 1]) * mask.pitch
        ys = mask.origin_y + np.stack([rows, rows + 1]) * mask.pitch
        r2max = 0.0
        for xe in xs:
            for ye in ys:
                r2max = max(r2max, float(np.max(xe * xe + ye * ye)))
        return math.sqrt(r2max)
    raise TypeError(f"unknown mask type {type(mask).__name__}")


# -- pixel-grid file format ------------------------------------------------
#
# Plain text.  Header line: "width height pitch_meters origin_x_meters
# origin_y_meters" (whitespace-tolerant).  Then `height` lines of `width`
# characters each, '1' transparent / '0' opaque, first line = top row.


def parse_pixel_grid(text: str) -> PixelGrid:
    lines = text.splitlines()
    if not lines:
        raise DomainError("empty pixel grid document")
    header = lines[0].split()
    if len(header) != 5:
        raise DomainError(
            "pixel grid header must be 'width height pitch origin_x origin_y'"
        )
    try:
        width, height = int(header[0]), int(header[1])
        pitch, origin_x, origin_y = (float(t) for t in header[2:])
    except ValueError as exc:
        raise DomainError(f"bad pixel grid header: {exc}") from None
    if width <= 0 or height <= 0:
        raise DomainError("pixel grid dimensions must be positive")
    body = lines[1:]
    if len(body) < height:
        raise DomainError(f"expected {height} raster lines, found {len(body)}")
    rows = []
    for i, line in enumerate(body[:height]):
        if len(line) != width:
            raise DomainError(f"raster line {i + 1} has {len(line)} chars, want {width}")
        if set(line) - {"0", "1"}:
            raise DomainError(f"raster line {i + 1} contains characters other than 0/1")
        rows.append([1 if ch == "1" else 0 for ch in line])
    # first data line is the top row; store bottom-up
    cells = np.asarray(rows[::-1], dtype=np.uint8)
    return PixelGrid(origin_x=origin_x, origin_y=origin_y, pitch=pitch, cells=cells)


def format_pixel_grid(grid: PixelGrid) -> str:
    header = f"{grid.width} {grid.height} {grid.pitch!r} {grid.origin_x!r} {grid.origin_y!r}"
    lines = [header]
    for row in grid.cells[::-1]:  # top row first
        lines.append("".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def load_pixel_grid(path) -> PixelGrid:
    with open(path, "r", encoding="ascii") as fh:
        return parse_pixel_grid(fh.read())


def save_pixel_grid(grid: PixelGrid, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_pixel_grid(grid))


def rasterize_circle(radius: float, pixels: int) -> PixelGrid:
    """Centered pixel-grid approximation of a circular aperture.

    The raster spans ``2 * radius * (1 + 2/pixels)`` so the disk edge
    never touches the border; a cell is transparent when its center lies
    inside the disk.
    """
    _require_positive("radius", radius)
    if pixels < 8:
        raise DomainError("need at least 8 pixels across")
    pitch = 2.0 * radius * (1.0 + 2.0 / pixels) / pixels
    origin = -0.5 * pixels * pitch
    centers = origin + (np.arange(pixels) + 0.5) * pitch
    xx, yy = np.meshgrid(centers, centers)
    cells = (xx * xx + yy * yy <= radius * radius).astype(np.uint8)
    return PixelGrid(origin_x=origin, origin_y=origin, pitch=pitch, cells=cells)
