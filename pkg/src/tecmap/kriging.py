"""Ordinary-Kriging baseline: IDW densification, semivariogram fit, prediction.

The baseline pipeline mirrors classical geostatistical mapping: scattered
measurements are first thickened with inverse-distance-weighted pseudo
observations on a coarse lattice, an isotropic semivariogram model is
fitted to the empirical semivariances of the thickened set, and ordinary
Kriging predicts every grid node from one factorization of the augmented
system.  Distances are Euclidean in degree space; at regional extents the
planar approximation is comfortably inside the semivariogram's own
uncertainty.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .exceptions import DegenerateInputError, FitError, ParameterError
from .grid import Grid, TecMap

_MODEL_KINDS = ("spherical", "exponential", "gaussian")
# Two points closer than this (degrees) are treated as the same location.
_COINCIDENT = 1e-9


@dataclass(frozen=True)
class SemivariogramModel:
    """Isotropic two-point variability model gamma(d).

    ``nugget`` is the discontinuity at the origin (gamma(0) itself is 0 by
    convention), ``sill`` the large-lag plateau, ``range`` the lag at which
    the plateau is (effectively) reached, in degrees.
    """

    kind: str
    nugget: float
    sill: float
    range: float

    def __post_init__(self):
        if self.kind not in _MODEL_KINDS:
            raise ParameterError(f"unknown semivariogram kind {self.kind!r}")
        if self.nugget < 0:
            raise ParameterError(f"nugget must be nonnegative, got {self.nugget}")
        if self.sill < self.nugget:
            raise ParameterError(f"sill {self.sill} below nugget {self.nugget}")
        if self.range <= 0:
            raise ParameterError(f"range must be positive, got {self.range}")

    def semivariance(self, d: np.ndarray) -> np.ndarray:
        """gamma evaluated elementwise; exactly 0 at zero lag."""
        d = np.asarray(d, dtype=np.float64)
        t = d / self.range
        partial = self.sill - self.nugget
        if self.kind == "spherical":
            shape = np.where(t < 1.0, 1.5 * t - 0.5 * t**3, 1.0)
        elif self.kind == "exponential":
            shape = 1.0 - np.exp(-3.0 * t)
        else:
            shape = 1.0 - np.exp(-3.0 * t * t)
        return np.where(d <= 0.0, 0.0, self.nugget + partial * shape)


@dataclass(frozen=True)
class ScatteredObs:
    """Point measurements at arbitrary (not grid-snapped) coordinates."""

    lats: np.ndarray
    lons: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lats = np.atleast_1d(np.asarray(self.lats, dtype=np.float64))
        lons = np.atleast_1d(np.asarray(self.lons, dtype=np.float64))
        vals = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if not (lats.shape == lons.shape == vals.shape) or lats.ndim != 1:
            raise ParameterError("lats, lons, values must be equal-length vectors")
        if lats.size == 0:
            raise DegenerateInputError("scattered observation set is empty")
        if not (np.all(np.isfinite(lats)) and np.all(np.isfinite(lons))
                and np.all(np.isfinite(vals))):
            raise ParameterError("coordinates and values must be finite")
        for name, arr in (("lats", lats), ("lons", lons), ("values", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class KrigingParams:
    """Knobs of the baseline pipeline, exposed end to end."""

    idw_power: float = 2.0
    idw_spacing: float = 1.0
    n_bins: int = 15
    model_kind: str = "spherical"
    max_lag: float | None = None

    def __post_init__(self):
        if self.idw_power <= 0:
            raise ParameterError(f"idw_power must be positive, got {self.idw_power}")
        if self.idw_spacing <= 0:
            raise ParameterError(f"idw_spacing must be positive, got {self.idw_spacing}")
        if self.n_bins < 3:
            raise ParameterError(f"need at least 3 semivariogram bins, got {self.n_bins}")
        if self.model_kind not in _MODEL_KINDS:
            raise ParameterError(f"unknown semivariogram kind {self.model_kind!r}")
        if self.max_lag is not None and self.max_lag <= 0:
            raise ParameterError("max_lag must be positive when given")


def _pairwise_distance(lat_a, lon_a, lat_b, lon_b) -> np.ndarray:
    """Planar degree-space distances between two point sets, (len a, len b)."""
    dlat = lat_a[:, None] - lat_b[None, :]
    dlon = lon_a[:, None] - lon_b[None, :]
    return np.hypot(dlat, dlon)


def idw_densify(obs: ScatteredObs, grid: Grid, power: float = 2.0,
                target_spacing: float = 1.0) -> ScatteredObs:
    """Augment ``obs`` with inverse-distance-weighted pseudo observations.

    Pseudo points sit on a coarse lattice (spacing ``target_spacing``
    degrees) across the grid's bounding box; each takes the IDW average of
    all real observations, except that a pseudo point coincident with a
    real one copies its value verbatim.
    """
    if power <= 0:
        raise ParameterError(f"power must be positive, got {power}")
    if target_spacing <= 0:
        raise ParameterError(f"target_spacing must be positive, got {target_spacing}")
    plat = np.arange(grid.lat_min, grid.lat_max + 1e-12, target_spacing)
    plon = np.arange(grid.lon_min, grid.lon_max + 1e-12, target_spacing)
    glat = np.repeat(plat, plon.size)
    glon = np.tile(plon, plat.size)
    d = _pairwise_distance(glat, glon, obs.lats, obs.lons)
    nearest = d.argmin(axis=1)
    coincident = d[np.arange(d.shape[0]), nearest] < _COINCIDENT
    with np.errstate(divide="ignore"):
        w = d ** (-power)
    w[~np.isfinite(w)] = 0.0
    denom = w.sum(axis=1)
    denom[coincident] = 1.0  # placeholder; overwritten below
    pseudo = (w @ obs.values) / denom
    pseudo[coincident] = obs.values[nearest[coincident]]
    return ScatteredObs(
        lats=np.concatenate([obs.lats, glat]),
        lons=np.concatenate([obs.lons, glon]),
        values=np.concatenate([obs.values, pseudo]))


def empirical_semivariogram(obs: ScatteredObs, n_bins: int = 15,
                            max_lag: float | None = None) -> list[tuple[float, float, int]]:
    """Binned Matheron estimator: gamma(h) = sum (v_i - v_j)^2 / (2 N_h).

    Returns (mean pair distance, semivariance, pair count) per nonempty
    bin, lags ascending.  Pairs beyond ``max_lag`` (default: half the
    largest pairwise distance) are ignored.
    """
    if obs.n < 2:
        raise DegenerateInputError("need at least 2 observations for a semivariogram")
    iu, ju = np.triu_indices(obs.n, k=1)
    d = np.hypot(obs.lats[iu] - obs.lats[ju], obs.lons[iu] - obs.lons[ju])
    sq = (obs.values[iu] - obs.values[ju]) ** 2
    if max_lag is None:
        max_lag = 0.5 * float(d.max())
        if max_lag <= 0:
            raise DegenerateInputError("all observations are coincident")
    edges = np.linspace(0.0, max_lag, n_bins + 1)
    keep = d <= max_lag
    d, sq = d[keep], sq[keep]
    which = np.clip(np.searchsorted(edges, d, side="right") - 1, 0, n_bins - 1)
    out = []
    for b in range(n_bins):
        mask = which == b
        count = int(mask.sum())
        if count == 0:
            continue
        out.append((float(d[mask].mean()), float(sq[mask].sum() / (2.0 * count)), count))
    return out


def fit_semivariogram(empirical: list[tuple[float, float, int]],
                      kind: str = "spherical") -> SemivariogramModel:
    """Weighted least-squares fit of (nugget, sill, range) to binned points.

    Pair counts weight the squared residuals.  A coarse grid search seeds
    a bounded local refinement, so the result is never worse than the best
    grid point.
    """
    if kind not in _MODEL_KINDS:
        raise ParameterError(f"unknown semivariogram kind {kind!r}")
    if len(empirical) < 3:
        raise FitError(f"need at least 3 semivariogram bins, got {len(empirical)}")
    lags = np.array([e[0] for e in empirical])
    gammas = np.array([e[1] for e in empirical])
    weights = np.sqrt(np.array([float(e[2]) for e in empirical]))

    gmax = float(gammas.max())
    lmax = float(lags.max())
    if gmax <= 0.0:
        # Perfectly flat data: pure-nugget-free degenerate surface.
        return SemivariogramModel(kind=kind, nugget=0.0, sill=1e-12, range=lmax or 1.0)

    def residuals(theta):
        nugget, partial, rng = theta
        model = SemivariogramModel(kind=kind, nugget=0.0, sill=1.0, range=rng)
        gam = nugget + partial * model.semivariance(lags) / 1.0
        return weights * (gam - gammas)

    best = None
    for fn in (0.0, 0.25, 0.5):
        for fp in (0.25, 0.5, 0.75, 1.0, 1.25):
            for fr in (0.25, 0.5, 0.75, 1.0, 1.5):
                theta = (fn * gmax, fp * gmax, fr * lmax)
                sse = float(np.sum(residuals(theta) ** 2))
                if best is None or sse < best[0]:
                    best = (sse, theta)
    x0 = np.array(best[1])
    x0[2] = max(x0[2], 1e-6)
    sol = scipy.optimize.least_squares(
        residuals, x0, bounds=([0.0, 0.0, 1e-9], [np.inf, np.inf, np.inf]))
    nugget, partial, rng = (sol.x if sol.cost * 2.0 <= best[0] else x0)
    return SemivariogramModel(kind=kind, nugget=float(nugget),
                              sill=float(nugget + partial), range=float(max(rng, 1e-9)))


def _coincident_groups(obs: ScatteredObs) -> list[np.ndarray]:
    """Groups of original indices sharing a location (within 1e-9 degrees)."""
    order = np.lexsort((obs.lons, obs.lats))
    lats, lons = obs.lats[order], obs.lons[order]
    groups = []
    i = 0
    while i < lats.size:
        j = i + 1
        while (j < lats.size and abs(lats[j] - lats[i]) < _COINCIDENT
               and abs(lons[j] - lons[i]) < _COINCIDENT):
            j += 1
        groups.append(order[i:j])
        i = j
    return groups


def merge_coincident(obs: ScatteredObs) -> ScatteredObs:
    """Average observations that share a location (within 1e-9 degrees)."""
    groups = _coincident_groups(obs)
    return ScatteredObs(
        lats=np.array([obs.lats[g[0]] for g in groups]),
        lons=np.array([obs.lons[g[0]] for g in groups]),
        values=np.array([float(obs.values[g].mean()) for g in groups]))


def ordinary_kriging(obs: ScatteredObs, model: SemivariogramModel,
                     grid: Grid) -> TecMap:
    """Predict every grid node by ordinary Kriging under ``model``.

    One factorization of the augmented system [Gamma 1; 1' 0] serves all
    nodes; the Lagrange row enforces weights summing to 1.  Coincident
    observations are averaged beforehand so Gamma stays nonsingular.
    """
    obs = merge_coincident(obs)
    n = obs.n
    d = _pairwise_distance(obs.lats, obs.lons, obs.lats, obs.lons)
    K = np.empty((n + 1, n + 1))
    K[:n, :n] = model.semivariance(d)
    K[n, :n] = 1.0
    K[:n, n] = 1.0
    K[n, n] = 0.0

    glat = np.repeat(grid.lats(), grid.Q)   # node order: p outer, q inner
    glon = np.tile(grid.lons(), grid.P)
    rhs = np.empty((n + 1, glat.size))
    rhs[:n] = model.semivariance(_pairwise_distance(obs.lats, obs.lons, glat, glon))
    rhs[n] = 1.0

    try:
        sol = scipy.linalg.lu_solve(scipy.linalg.lu_factor(K), rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    pred = obs.values @ sol[:n]
    return TecMap(grid, pred.reshape((grid.P, grid.Q), order="C"))


def kriging_weights(obs: ScatteredObs, model: SemivariogramModel,
                    lat: float, lon: float) -> tuple[np.ndarray, float]:
    """Weights and Lagrange multiplier for a single target point.

    Slow per-point path used by diagnostics and tests; prediction is
    weights @ values.  Weights come back aligned with the caller's
    observation order: a coincident group's weight is split evenly over
    its members, which leaves the prediction unchanged because the merged
    value is their mean.
    """
    groups = _coincident_groups(obs)
    merged = merge_coincident(obs)
    n = merged.n
    K = np.empty((n + 1, n + 1))
    K[:n, :n] = model.semivariance(
        _pairwise_distance(merged.lats, merged.lons, merged.lats, merged.lons))
    K[n, :n] = 1.0
    K[:n, n] = 1.0
    K[n, n] = 0.0
    rhs = np.empty(n + 1)
    rhs[:n] = model.semivariance(np.hypot(merged.lats - lat, merged.lons - lon))
    rhs[n] = 1.0
    try:
        sol = np.linalg.solve(K, rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    weights = np.empty(obs.n)
    for g, w in zip(groups, sol[:n]):
        weights[g] = w / g.size
    return weights, float(sol[n])


def kriging_predict(obs: ScatteredObs, grid: Grid,
                    params: KrigingParams = KrigingParams()) -> TecMap:
    """Full baseline pipeline: densify, fit the semivariogram, krige."""
    dense = idw_densify(obs, grid, power=params.idw_power,
                        target_spacing=params.idw_spacing)
    empirical = empirical_semivariogram(dense, n_bins=params.n_bins,
                                        max_lag=params.max_lag)
    model = fit_semivariogram(empirical, kind=params.model_kind)
    return ordinary_kriging(dense, model, grid)
