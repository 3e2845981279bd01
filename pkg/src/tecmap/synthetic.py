"""Closed-form synthetic TEC patterns used as ground truth in experiments.

Five patterns mimic typical ionospheric states: a linear dawn trend, a
quadratic and a Gaussian midday trend, and two disturbed-day mixtures with
sinusoidal ripples.  Trigonometric arguments take the raw degree-valued
coordinate differences (evaluated in radians), which keeps the ripple
count across the region at the intended handful of periods.
"""
from __future__ import annotations

import enum
from collections.abc import Iterable

import numpy as np

from . import dct
from .grid import DEFAULT_GRID, Grid, TecMap


class SyntheticKind(enum.Enum):
    """The five built-in synthetic map patterns."""

    SM1 = "sm1"  # linear trend (dawn, quiet day)
    SM2 = "sm2"  # quadratic trend (midday, quiet day)
    SM3 = "sm3"  # gaussian trend (midday, quiet day)
    SM4 = "sm4"  # gaussian trend + sinusoidal disturbance (midday, disturbed day)
    SM5 = "sm5"  # linear trend + sinusoidal disturbance (dusk, disturbed day)


# Sparsity levels of the five patterns on the default grid, used to
# calibrate the default energy fraction of dct.sparsity_level.
NOMINAL_SPARSITY = {
    SyntheticKind.SM1: 3,
    SyntheticKind.SM2: 7,
    SyntheticKind.SM3: 6,
    SyntheticKind.SM4: 21,
    SyntheticKind.SM5: 11,
}


def synth_value(kind: SyntheticKind, lat, lon):
    """Evaluate a pattern at latitude/longitude (degrees); broadcasts over arrays."""
    phi = np.asarray(lat, dtype=np.float64)
    lam = np.asarray(lon, dtype=np.float64)
    if kind is SyntheticKind.SM1:
        return 25.0 - 0.3 * phi + 0.3 * lam
    if kind is SyntheticKind.SM2:
        return 25.0 - 0.3 * (phi - 34.0) ** 2 + 0.3 * (lam - 35.0) ** 2
    if kind is SyntheticKind.SM3:
        return 20.0 + 5.0 * np.exp(-(((phi - 34.0) / 10.0) ** 2) - ((lam - 35.0) / 7.0) ** 2)
    if kind is SyntheticKind.SM4:
        return (
            21.0
            + 6.0 * np.sqrt(np.cos(phi - 35.0) ** 2 + np.sin(lam - 32.0) ** 2)
            - 6.0 * np.exp(0.25 * (np.cos(phi - 35.0) + np.cos(lam - 32.0)))
        )
    if kind is SyntheticKind.SM5:
        return 46.0 - 0.3 * phi - 0.3 * lam + 0.5 * np.cos(1.5 * (lam - phi))
    raise TypeError(f"unknown synthetic kind {kind!r}")


def synth_map(kind: SyntheticKind, grid: Grid = DEFAULT_GRID) -> TecMap:
    """Pattern evaluated at every grid node."""
    values = synth_value(kind, grid.lats()[:, None], grid.lons()[None, :])
    return TecMap(grid, values)


def synthetic_sparsity_table(
    grid: Grid = DEFAULT_GRID,
    energy_fraction: float = dct.DEFAULT_ENERGY_FRACTION,
) -> list[tuple[SyntheticKind, int]]:
    """Sparsity level of each pattern's coefficient vector on the given grid."""
    return [
        (kind, dct.sparsity_level(dct.dct2_forward(synth_map(kind, grid)), energy_fraction))
        for kind in SyntheticKind
    ]


def calibrate_energy_fraction(
    grid: Grid = DEFAULT_GRID,
    candidates: Iterable[float] = (0.99, 0.999, 0.9999, 0.99999),
    targets: dict[SyntheticKind, int] = NOMINAL_SPARSITY,
) -> tuple[float, dict[float, list[tuple[SyntheticKind, int]]]]:
    """Pick the candidate energy fraction whose sparsity table best matches
    the nominal levels (smallest total absolute deviation; ties go to the
    smaller fraction).  Returns the winner and the full table per candidate.
    """
    tables = {eta: synthetic_sparsity_table(grid, eta) for eta in candidates}
    best = min(
        tables,
        key=lambda eta: (sum(abs(k - targets[kind]) for kind, k in tables[eta]), eta),
    )
    return best, tables
