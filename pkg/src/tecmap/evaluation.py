"""Experiment harness: error metric, observation sweeps, cross-check holdout.

All randomness flows through one seeded generator per harness call, and
every random subset is pre-drawn before any solving starts, so results
are reproducible bit for bit and independent of execution schedule.  The
reconstruction and Kriging pipelines themselves are deterministic.
"""
from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError, DimensionError, ParameterError
from .grid import DEFAULT_GRID, Grid, TecMap, nearest_grid_index
from .kriging import KrigingParams, ScatteredObs, kriging_predict
from .sensing import Station, build_observation_set
from .solver import SolverParams, reconstruct
from .synthetic import SyntheticKind, synth_map, synth_value

DEFAULT_NETWORK_SIZE = 146


@dataclass(frozen=True)
class SweepPoint:
    """Errors of one sample count: per-trial values and their mean."""

    count: int
    mean_error: float
    trials: int
    errors: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    kind: SyntheticKind
    points: tuple[SweepPoint, ...]


@dataclass(frozen=True)
class CrossCheckPoint:
    holdout: int
    mean_error: float
    trials: int
    errors: tuple[float, ...]


@dataclass(frozen=True)
class CrossCheckResult:
    method: str
    points: tuple[CrossCheckPoint, ...]


def normalized_error_energy(truth, estimate) -> float:
    """||u - u_hat||^2 / ||u||^2 over maps or plain vectors."""
    u = truth.values if isinstance(truth, TecMap) else np.asarray(truth, dtype=np.float64)
    v = estimate.values if isinstance(estimate, TecMap) else np.asarray(estimate, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch: truth {u.shape} vs estimate {v.shape}")
    den = float(np.sum(u * u))
    if den == 0.0:
        raise DegenerateInputError("truth has zero energy; the metric is undefined")
    diff = u - v
    return float(np.sum(diff * diff) / den)


def default_station_network(grid: Grid = DEFAULT_GRID, n: int = DEFAULT_NETWORK_SIZE,
                            seed: int = 0, jitter: float = 0.4) -> list[Station]:
    """Quasi-uniform seeded network of ``n`` stations over the grid box.

    A near-square lattice spanning the box is jittered point by point with
    uniform offsets up to ``jitter`` of the lattice spacing, clamped back
    into the box; the first ``n`` lattice points in row-major order are
    kept.  Seed 0 is the canonical network used by the experiments.
    """
    if n < 1:
        raise ParameterError(f"need at least one station, got n={n}")
    lat_span = grid.lat_max - grid.lat_min
    lon_span = grid.lon_max - grid.lon_min
    rows = max(1, round(math.sqrt(n * lat_span / lon_span))) if lon_span > 0 else n
    cols = math.ceil(n / rows)
    if rows * cols < n:  # rounding guard
        cols = math.ceil(n / rows)
    lat_nodes = (np.linspace(grid.lat_min, grid.lat_max, rows)
                 if rows > 1 else np.array([0.5 * (grid.lat_min + grid.lat_max)]))
    lon_nodes = (np.linspace(grid.lon_min, grid.lon_max, cols)
                 if cols > 1 else np.array([0.5 * (grid.lon_min + grid.lon_max)]))
    dlat = lat_span / max(rows - 1, 1)
    dlon = lon_span / max(cols - 1, 1)
    rng = np.random.default_rng(seed)
    stations = []
    k = 0
    for la in lat_nodes:
        for lo in lon_nodes:
            jla = min(max(la + rng.uniform(-jitter * dlat, jitter * dlat), grid.lat_min),
                      grid.lat_max)
            jlo = min(max(lo + rng.uniform(-jitter * dlon, jitter * dlon), grid.lon_min),
                      grid.lon_max)
            stations.append(Station(id=f"s{k:03d}", lat=jla, lon=jlo))
            k += 1
    return stations[:n]


def station_measurements(kind: SyntheticKind, stations: list[Station],
                         grid: Grid = DEFAULT_GRID) -> list[tuple[Station, float]]:
    """Sample a synthetic pattern at each station's nearest grid node.

    The measurement model reads map pixels, so the synthetic ground truth
    is sampled exactly where the sensing operator will look; a station's
    own coordinates only select the pixel.
    """
    out = []
    for st in stations:
        p, q = nearest_grid_index(st.lat, st.lon, grid)
        out.append((st, float(synth_value(kind, grid.lat(p), grid.lon(q)))))
    return out


def _map_values(pairs, grid, method, params, kriging_params) -> np.ndarray:
    """Fit one map from (station, value) pairs; returns the value matrix."""
    if method == "cs":
        obs = build_observation_set(pairs, grid)
        return reconstruct(obs, params).map.values
    scattered = ScatteredObs(
        lats=np.array([st.lat for st, _ in pairs]),
        lons=np.array([st.lon for st, _ in pairs]),
        values=np.array([v for _, v in pairs]))
    return kriging_predict(scattered, grid, kriging_params).values


def _sweep_trial(task):
    pairs, grid, params, truth = task
    est = _map_values(pairs, grid, "cs", params, None)
    return normalized_error_energy(truth, est)


def _crosscheck_trial(task):
    kept, held_nodes, held_values, method, grid, params, kparams = task
    est = _map_values(kept, grid, method, params, kparams)
    predicted = np.array([est[p, q] for p, q in held_nodes])
    return normalized_error_energy(held_values, predicted)


def _run(tasks, worker, jobs):
    if jobs <= 1:
        return [worker(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def sweep_observation_count(kind: SyntheticKind, stations: list[Station],
                            counts: list[int], trials: int, seed: int = 0,
                            params: SolverParams = SolverParams(),
                            grid: Grid = DEFAULT_GRID, jobs: int = 1) -> SweepResult:
    """Mean reconstruction error as a function of observation count.

    For each count, ``trials`` random station subsets (without
    replacement) are drawn up front from one seeded generator; each subset
    is reconstructed and scored against the synthetic truth map.  Subset
    indices are sorted so a full-set draw is literally the same problem
    every trial.
    """
    if trials < 1:
        raise ParameterError(f"trials must be at least 1, got {trials}")
    n = len(stations)
    for count in counts:
        if count < 1 or count > n:
            raise ParameterError(
                f"sample count {count} outside 1..{n} available stations")
    pairs = station_measurements(kind, stations, grid)
    truth = synth_map(kind, grid).values
    rng = np.random.default_rng(seed)
    subsets = [[np.sort(rng.choice(n, size=count, replace=False)) for _ in range(trials)]
               for count in counts]
    tasks = [([pairs[i] for i in sel], grid, params, truth)
             for per_count in subsets for sel in per_count]
    errors = _run(tasks, _sweep_trial, jobs)
    points = []
    for ci, count in enumerate(counts):
        errs = tuple(errors[ci * trials:(ci + 1) * trials])
        points.append(SweepPoint(count=count, mean_error=float(np.mean(errs)),
                                 trials=trials, errors=errs))
    return SweepResult(kind=kind, points=tuple(points))


def cross_check(obs_values: list[tuple[Station, float]], holdout_counts: list[int],
                trials: int, seed: int = 0, method: str = "cs",
                params: SolverParams = SolverParams(),
                kriging_params: KrigingParams = KrigingParams(),
                grid: Grid = DEFAULT_GRID, jobs: int = 1) -> CrossCheckResult:
    """Holdout validation: fit on most measurements, score on the rest.

    Per trial, ``holdout`` measurements are withheld, the map is fitted on
    the remainder by the chosen method, and the error energy between the
    held-out values and the map at their snapped nodes is recorded; the
    points carry the per-trial errors and their mean.
    """
    if method not in ("cs", "kriging"):
        raise ParameterError(f"method must be 'cs' or 'kriging', got {method!r}")
    if trials < 1:
        raise ParameterError(f"trials must be at least 1, got {trials}")
    n = len(obs_values)
    for h in holdout_counts:
        if h < 1 or h >= n:
            raise ParameterError(
                f"holdout count {h} must be in 1..{n - 1} for {n} measurements")
    node_of = [nearest_grid_index(st.lat, st.lon, grid) for st, _ in obs_values]
    rng = np.random.default_rng(seed)
    draws = [[np.sort(rng.choice(n, size=h, replace=False)) for _ in range(trials)]
             for h in holdout_counts]
    tasks = []
    for per_h in draws:
        for held in per_h:
            mask = np.zeros(n, dtype=bool)
            mask[held] = True
            kept = [obs_values[i] for i in range(n) if not mask[i]]
            held_nodes = [node_of[i] for i in held]
            held_values = np.array([obs_values[i][1] for i in held])
            tasks.append((kept, held_nodes, held_values, method, grid, params,
                          kriging_params))
    errors = _run(tasks, _crosscheck_trial, jobs)
    points = []
    for hi, h in enumerate(holdout_counts):
        errs = tuple(errors[hi * trials:(hi + 1) * trials])
        points.append(CrossCheckPoint(holdout=h, mean_error=float(np.mean(errs)),
                                      trials=trials, errors=errs))
    return CrossCheckResult(method=method, points=tuple(points))
