"""Orthonormal 2D discrete cosine transform between map and coefficient space.

The coefficient vector follows the same column-stacking rule as the map
vector: ``s[P*l + k]`` is the coefficient of the basis function with wave
numbers ``(k, l)``.  Transforms are evaluated as two separable 1D passes
(one matrix product per axis); the dense PQ-by-PQ synthesis matrix is
never formed outside of test oracles.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError, DimensionError, ParameterError
from .grid import Grid, TecMap

# Energy fraction defining the default sparsity measure.  Calibrated over
# the five built-in synthetic patterns on the default grid (see
# synthetic.calibrate_energy_fraction and scripts/calibrate_sparsity.py).
DEFAULT_ENERGY_FRACTION = 0.9999


@dataclass(frozen=True)
class SpectralCoeffs:
    """Column-stacked 2D-DCT coefficients of a P-by-Q map."""

    P: int
    Q: int
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.float64)
        if s.ndim != 1 or s.size != self.P * self.Q:
            raise DimensionError(f"coefficient vector of length {s.size} does not fit {self.P}x{self.Q}")
        if not np.all(np.isfinite(s)):
            raise ParameterError("coefficients must be finite")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "s", s)

    def matrix(self) -> np.ndarray:
        """Coefficients as a P-by-Q matrix S with S[k, l] = s[P*l + k]."""
        return self.s.reshape((self.P, self.Q), order="F")


def basis_entry(k: int, l: int, p: int, q: int, P: int, Q: int) -> float:
    """Value of the (k, l) orthonormal cosine basis function at pixel (p, q)."""
    if not (0 <= k < P and 0 <= p < P):
        raise DimensionError(f"row indices k={k}, p={p} outside [0, {P})")
    if not (0 <= l < Q and 0 <= q < Q):
        raise DimensionError(f"column indices l={l}, q={q} outside [0, {Q})")
    ak = math.sqrt(1.0 / P) if k == 0 else math.sqrt(2.0 / P)
    al = math.sqrt(1.0 / Q) if l == 0 else math.sqrt(2.0 / Q)
    return ak * al * math.cos(math.pi * (2 * p + 1) * k / (2 * P)) * math.cos(math.pi * (2 * q + 1) * l / (2 * Q))


@functools.lru_cache(maxsize=32)
def analysis_matrix_1d(n: int) -> np.ndarray:
    """Orthonormal 1D DCT analysis matrix T, with T[k, p] the k-th basis value at p."""
    k = np.arange(n)[:, None]
    p = np.arange(n)[None, :]
    alpha = np.full((n, 1), math.sqrt(2.0 / n))
    alpha[0, 0] = math.sqrt(1.0 / n)
    t = alpha * np.cos(np.pi * (2 * p + 1) * k / (2 * n))
    t.flags.writeable = False
    return t


def analysis_2d(values: np.ndarray) -> np.ndarray:
    """Coefficient matrix S of a value matrix U (separable, one pass per axis)."""
    tp = analysis_matrix_1d(values.shape[0])
    tq = analysis_matrix_1d(values.shape[1])
    return tp @ values @ tq.T


def synthesis_2d(coeffs: np.ndarray) -> np.ndarray:
    """Value matrix U of a coefficient matrix S; exact inverse of :func:`analysis_2d`."""
    tp = analysis_matrix_1d(coeffs.shape[0])
    tq = analysis_matrix_1d(coeffs.shape[1])
    return tp.T @ coeffs @ tq


def dct2_forward(tec_map: TecMap) -> SpectralCoeffs:
    """Map-space to coefficient-space transform."""
    s = analysis_2d(tec_map.values)
    return SpectralCoeffs(tec_map.grid.P, tec_map.grid.Q, s.flatten(order="F"))


def dct2_inverse(coeffs: SpectralCoeffs, grid: Grid) -> TecMap:
    """Coefficient-space back to map-space; adjoint and inverse of :func:`dct2_forward`."""
    if (coeffs.P, coeffs.Q) != (grid.P, grid.Q):
        raise DimensionError(f"coefficients are {coeffs.P}x{coeffs.Q} but grid is {grid.P}x{grid.Q}")
    u = synthesis_2d(coeffs.matrix())
    return TecMap(grid, u)


def sparsity_level(coeffs: SpectralCoeffs, energy_fraction: float = DEFAULT_ENERGY_FRACTION) -> int:
    """Smallest K such that the K largest-magnitude coefficients carry
    at least ``energy_fraction`` of the total squared energy.

    Equal magnitudes are counted in index order; K counts coefficients,
    not distinct magnitude values.
    """
    if not (0.0 < energy_fraction <= 1.0):
        raise ParameterError(f"energy fraction must be in (0, 1], got {energy_fraction}")
    energy = coeffs.s**2
    if not energy.any():
        raise DegenerateInputError("all-zero coefficient vector has no sparsity level")
    order = np.argsort(-np.abs(coeffs.s), kind="stable")
    cumulative = np.cumsum(energy[order])
    total = cumulative[-1]
    return int(np.searchsorted(cumulative, energy_fraction * total)) + 1
