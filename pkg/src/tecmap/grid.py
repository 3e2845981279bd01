"""Rectangular lat/lon raster and the shared vectorization convention.

Every module in this package indexes map pixels the same way: pixel
``(p, q)`` sits at ``(lat_min + p*dlat, lon_min + q*dlon)`` with
``(0, 0)`` the lower-left (south-west) corner, and a P-by-Q matrix
flattens column-by-column so that flat index ``n = P*q + p``.  Keeping
a single convention here prevents silent transpositions downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, OutOfRegionError, ParameterError

# Tolerance, in pixel units, added on top of the half-pixel snap domain
# to absorb floating-point dust in coordinate arithmetic.
_SNAP_SLACK = 1e-9


@dataclass(frozen=True)
class Grid:
    """Regular lat/lon raster: P rows (latitude) by Q columns (longitude)."""

    lat_min: float
    lon_min: float
    dlat: float
    dlon: float
    P: int
    Q: int

    def __post_init__(self):
        if self.P < 2 or self.Q < 2:
            raise ParameterError(f"grid needs at least 2x2 pixels, got {self.P}x{self.Q}")
        if not (self.dlat > 0 and self.dlon > 0):
            raise ParameterError(f"pixel size must be positive, got dlat={self.dlat}, dlon={self.dlon}")

    @property
    def n_pixels(self) -> int:
        return self.P * self.Q

    @property
    def lat_max(self) -> float:
        return self.lat_min + (self.P - 1) * self.dlat

    @property
    def lon_max(self) -> float:
        return self.lon_min + (self.Q - 1) * self.dlon

    def lat(self, p: int) -> float:
        return self.lat_min + p * self.dlat

    def lon(self, q: int) -> float:
        return self.lon_min + q * self.dlon

    def lats(self) -> np.ndarray:
        """Node latitudes, ascending, length P."""
        return self.lat_min + self.dlat * np.arange(self.P)

    def lons(self) -> np.ndarray:
        """Node longitudes, ascending, length Q."""
        return self.lon_min + self.dlon * np.arange(self.Q)


# Default experiment raster: 26 x 63 = 1638 pixels at 0.3 degree spacing,
# lat [34.0, 41.5] x lon [26.0, 44.6].  The box keeps the Gaussian bump of
# the built-in synthetic patterns (centred at 34N 35E) on a grid node and
# keeps all five patterns strictly positive.
DEFAULT_GRID = Grid(lat_min=34.0, lon_min=26.0, dlat=0.3, dlon=0.3, P=26, Q=63)


@dataclass(frozen=True)
class TecMap:
    """TEC values (TECU) on a :class:`Grid`; ``values[p, q]`` is row p, column q."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.P, self.grid.Q):
            raise DimensionError(
                f"values shape {values.shape} does not match grid {self.grid.P}x{self.grid.Q}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterError("map values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def flat_index(grid: Grid, p: int, q: int) -> int:
    """Column-stacked flat index n = P*q + p of pixel (p, q)."""
    if not (0 <= p < grid.P and 0 <= q < grid.Q):
        raise DimensionError(f"pixel ({p}, {q}) outside {grid.P}x{grid.Q} grid")
    return grid.P * q + p


def pixel_of(grid: Grid, n: int) -> tuple[int, int]:
    """Inverse of :func:`flat_index`: flat index n back to pixel (p, q)."""
    if not (0 <= n < grid.n_pixels):
        raise DimensionError(f"flat index {n} outside [0, {grid.n_pixels})")
    return n % grid.P, n // grid.P


def vectorize(tec_map: TecMap) -> np.ndarray:
    """Column-stack a map into a length-PQ vector, u[P*q + p] = values[p, q]."""
    return tec_map.values.flatten(order="F")


def devectorize(u: np.ndarray, grid: Grid) -> TecMap:
    """Exact inverse of :func:`vectorize`."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size != grid.n_pixels:
        raise DimensionError(f"vector of length {u.size} cannot fill a {grid.P}x{grid.Q} grid")
    return TecMap(grid, u.reshape((grid.P, grid.Q), order="F"))


def _nearest_axis(offset: float, count: int, label: str) -> int:
    """Nearest node index along one axis; offset is in pixel units.

    Ties between two nodes round toward the lower index.  Offsets up to
    half a pixel outside [0, count-1] snap to the boundary node; anything
    farther raises OutOfRegionError.
    """
    lo = math.floor(offset)
    if lo < 0:
        idx = 0
    elif lo >= count - 1:
        idx = count - 1
    else:
        idx = lo if (offset - lo) <= (lo + 1 - offset) else lo + 1
    if abs(offset - idx) > 0.5 + _SNAP_SLACK:
        raise OutOfRegionError(f"{label} offset {offset:.6g} pixels is farther than half a pixel outside the grid")
    return idx


def nearest_grid_index(lat: float, lon: float, grid: Grid) -> tuple[int, int]:
    """Pixel (p, q) whose node is nearest to (lat, lon); ties round down.

    Coordinates may lie at most half a pixel outside the bounding box;
    beyond that an :class:`OutOfRegionError` is raised.
    """
    p = _nearest_axis((lat - grid.lat_min) / grid.dlat, grid.P, "latitude")
    q = _nearest_axis((lon - grid.lon_min) / grid.dlon, grid.Q, "longitude")
    return p, q
