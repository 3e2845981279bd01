"""Observation model: nearest-node snapping and the sampled-DCT operator.

A measurement taken at a station is assigned to the nearest grid node, so
the forward model for a coefficient vector ``s`` is "synthesize the map,
then read it at the observed pixels".  Both the operator and its adjoint
are applied matrix-free through the separable transforms in :mod:`.dct`;
the dense matrix is only ever built as a cross-check on tiny grids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dct import SpectralCoeffs, analysis_matrix_1d, dct2_forward, dct2_inverse
from .exceptions import DimensionError, NoObservationsError, OutOfRegionError
from .grid import DEFAULT_GRID, Grid, TecMap, flat_index, nearest_grid_index


@dataclass(frozen=True)
class Station:
    """A named measurement site at geodetic coordinates (degrees)."""

    id: str
    lat: float
    lon: float


@dataclass(frozen=True)
class ObservationSet:
    """Measurements snapped to distinct grid pixels.

    ``indices`` are flat pixel indices (column-stacked, ``n = P*q + p``),
    strictly increasing; ``values`` are the TECU measurements after any
    same-pixel averaging.  ``dropped`` records stations that fell outside
    the snap tolerance, ``n_merged`` counts stations absorbed into a
    shared pixel beyond the first.
    """

    grid: Grid
    indices: np.ndarray
    values: np.ndarray
    dropped: tuple[Station, ...] = ()
    n_merged: int = 0

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise DimensionError(
                f"indices and values must be equal-length vectors, got {idx.shape} and {val.shape}")
        if idx.size == 0:
            raise NoObservationsError("observation set is empty")
        if idx.size > self.grid.n_pixels:
            raise DimensionError(
                f"{idx.size} observations exceed the {self.grid.n_pixels}-pixel grid")
        if idx.min() < 0 or idx.max() >= self.grid.n_pixels:
            raise DimensionError("flat index out of range for the grid")
        if np.unique(idx).size != idx.size:
            raise DimensionError("observation pixels must be distinct")
        if not np.all(np.isfinite(val)):
            raise DimensionError("observation values must be finite")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def m(self) -> int:
        """Number of observations."""
        return int(self.indices.size)


def build_observation_set(
    stations_with_values: list[tuple[Station, float]], grid: Grid = DEFAULT_GRID
) -> ObservationSet:
    """Snap (station, TECU) pairs to grid pixels.

    Stations farther than half a pixel outside the raster are dropped and
    reported via :attr:`ObservationSet.dropped`.  Stations landing on the
    same pixel are averaged into a single entry.  Raises
    :class:`NoObservationsError` if nothing survives.
    """
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    dropped: list[Station] = []
    for station, value in stations_with_values:
        try:
            p, q = nearest_grid_index(station.lat, station.lon, grid)
        except OutOfRegionError:
            dropped.append(station)
            continue
        n = flat_index(grid, p, q)
        sums[n] = sums.get(n, 0.0) + float(value)
        counts[n] = counts.get(n, 0) + 1
    if not sums:
        raise NoObservationsError(
            f"none of the {len(stations_with_values)} stations fall on the grid")
    indices = np.array(sorted(sums), dtype=np.intp)
    values = np.array([sums[n] / counts[n] for n in indices], dtype=np.float64)
    n_merged = sum(counts.values()) - len(counts)
    return ObservationSet(grid=grid, indices=indices, values=values,
                          dropped=tuple(dropped), n_merged=n_merged)


def _check_dims(s: SpectralCoeffs, obs: ObservationSet) -> None:
    if (s.P, s.Q) != (obs.grid.P, obs.grid.Q):
        raise DimensionError(
            f"coefficients are {s.P}x{s.Q} but the observation grid is "
            f"{obs.grid.P}x{obs.grid.Q}")


def apply_sensing(s: SpectralCoeffs, obs: ObservationSet) -> np.ndarray:
    """Forward operator: synthesize the map from ``s`` and sample it.

    Equals the dense product of the row-sampled synthesis matrix with the
    coefficient vector, at O(N(P+Q)) cost instead of O(MN).
    """
    _check_dims(s, obs)
    u = dct2_inverse(s, obs.grid).values.flatten(order="F")
    return u[obs.indices]


def apply_sensing_adjoint(r: np.ndarray, obs: ObservationSet) -> SpectralCoeffs:
    """Adjoint operator: scatter residuals to their pixels and analyse."""
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (obs.m,):
        raise DimensionError(f"expected a length-{obs.m} vector, got shape {r.shape}")
    flat = np.zeros(obs.grid.n_pixels)
    flat[obs.indices] = r
    scattered = TecMap(obs.grid, flat.reshape((obs.grid.P, obs.grid.Q), order="F"))
    return dct2_forward(scattered)


def dense_sensing_matrix(obs: ObservationSet) -> np.ndarray:
    """Materialized M-by-N sensing matrix; test oracle only.

    Builds the full synthesis matrix via a Kronecker product and keeps the
    observed rows.  O(N^2) memory -- reserve for small grids.
    """
    tp = analysis_matrix_1d(obs.grid.P)
    tq = analysis_matrix_1d(obs.grid.Q)
    synthesis = np.kron(tq, tp).T  # column-stacked vec: u = kron(Tq, Tp)' s
    return synthesis[obs.indices, :]
