"""Command-line driver: every pipeline stage as a reproducible subcommand.

All stochastic behavior flows through an explicit ``--seed`` (default 0,
never wall-clock), so identical invocations write identical bytes.  Exit
codes: 0 success, 2 usage, 3 bad data or parameters, 4 non-convergence
under ``--strict``.
"""
from __future__ import annotations

import argparse
import sys

from . import io as tio
from .dct import DEFAULT_ENERGY_FRACTION, dct2_forward, sparsity_level
from .evaluation import (cross_check, default_station_network,
                         station_measurements, sweep_observation_count)
from .exceptions import TecMapError
from .grid import DEFAULT_GRID, Grid
from .kriging import KrigingParams, ScatteredObs, kriging_predict
from .sensing import build_observation_set
from .solver import SolverParams, reconstruct
from .synthetic import SyntheticKind, synth_map

_EXIT_OK = 0
_EXIT_DATA = 3
_EXIT_NOT_CONVERGED = 4


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    g = DEFAULT_GRID
    p.add_argument("--lat-min", type=float, default=g.lat_min,
                   help=f"south edge of the grid in degrees (default {g.lat_min})")
    p.add_argument("--lon-min", type=float, default=g.lon_min,
                   help=f"west edge of the grid in degrees (default {g.lon_min})")
    p.add_argument("--dlat", type=float, default=g.dlat,
                   help=f"latitude pixel size in degrees (default {g.dlat})")
    p.add_argument("--dlon", type=float, default=g.dlon,
                   help=f"longitude pixel size in degrees (default {g.dlon})")
    p.add_argument("--rows", type=int, default=g.P,
                   help=f"number of latitude rows P (default {g.P})")
    p.add_argument("--cols", type=int, default=g.Q,
                   help=f"number of longitude columns Q (default {g.Q})")


def _grid_from(args) -> Grid:
    return Grid(lat_min=args.lat_min, lon_min=args.lon_min, dlat=args.dlat,
                dlon=args.dlon, P=args.rows, Q=args.cols)


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    d = SolverParams()
    p.add_argument("--sigma", type=float, default=d.sigma,
                   help=f"Butterworth cutoff wave number (default {d.sigma})")
    p.add_argument("--gamma", type=float, default=d.gamma,
                   help=f"gradient-energy penalty weight (default {d.gamma})")
    p.add_argument("--epsilon", type=float, default=d.epsilon,
                   help=f"normalized residual bound (default {d.epsilon})")
    p.add_argument("--feas-tol", type=float, default=d.feas_tol,
                   help=f"relative width of the residual target band (default {d.feas_tol})")
    p.add_argument("--opt-tol", type=float, default=d.opt_tol,
                   help=f"relative objective-change stopping tolerance (default {d.opt_tol})")
    p.add_argument("--max-iters", type=int, default=d.max_iters,
                   help=f"inner iteration cap (default {d.max_iters})")
    p.add_argument("--multiplier-iters", type=int, default=d.multiplier_search_iters,
                   help=f"multiplier search budget (default {d.multiplier_search_iters})")


def _solver_params(args) -> SolverParams:
    return SolverParams(sigma=args.sigma, gamma=args.gamma, epsilon=args.epsilon,
                        feas_tol=args.feas_tol, opt_tol=args.opt_tol,
                        max_iters=args.max_iters,
                        multiplier_search_iters=args.multiplier_iters)


def _add_kriging_flags(p: argparse.ArgumentParser) -> None:
    d = KrigingParams()
    p.add_argument("--idw-power", type=float, default=d.idw_power,
                   help=f"inverse-distance weighting exponent (default {d.idw_power})")
    p.add_argument("--idw-spacing", type=float, default=d.idw_spacing,
                   help=f"pseudo-observation lattice spacing in degrees (default {d.idw_spacing})")
    p.add_argument("--bins", type=int, default=d.n_bins,
                   help=f"semivariogram bins (default {d.n_bins})")
    p.add_argument("--model", choices=("spherical", "exponential", "gaussian"),
                   default=d.model_kind,
                   help=f"semivariogram family (default {d.model_kind})")
    p.add_argument("--max-lag", type=float, default=None,
                   help="largest pair distance used in the fit (default: half the data extent)")


def _kriging_params(args) -> KrigingParams:
    return KrigingParams(idw_power=args.idw_power, idw_spacing=args.idw_spacing,
                         n_bins=args.bins, model_kind=args.model,
                         max_lag=args.max_lag)


def _kind(raw: str) -> SyntheticKind:
    try:
        return SyntheticKind(raw.lower())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown synthetic kind {raw!r}; choose from "
            f"{', '.join(k.value for k in SyntheticKind)}") from None


def _counts(raw: str) -> list[int]:
    try:
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {raw!r}") from None


def _read_pairs(args):
    stations = tio.read_stations(args.stations) if args.stations else None
    return tio.read_measurements(args.measurements, stations)


def cmd_synth(args) -> int:
    grid = _grid_from(args)
    tio.write_grid(synth_map(args.kind, grid), args.out)
    print(f"synth: wrote {args.kind.value} on {grid.P}x{grid.Q} grid to {args.out}")
    return _EXIT_OK


def cmd_reconstruct(args) -> int:
    grid = _grid_from(args)
    pairs = _read_pairs(args)
    obs = build_observation_set(pairs, grid)
    if obs.dropped:
        print(f"reconstruct: dropped {len(obs.dropped)} off-grid stations", file=sys.stderr)
    if obs.n_merged:
        print(f"reconstruct: merged {obs.n_merged} same-pixel measurements", file=sys.stderr)
    result = reconstruct(obs, _solver_params(args))
    tio.write_grid(result.map, args.out)
    print(f"reconstruct: M={obs.m} iterations={result.iterations} "
          f"objective={result.objective} residual={result.normalized_residual} "
          f"lambda={result.lambda_} converged={result.converged}")
    if args.strict and not result.converged:
        print("reconstruct: not converged (--strict)", file=sys.stderr)
        return _EXIT_NOT_CONVERGED
    return _EXIT_OK


def cmd_krige(args) -> int:
    import numpy as np

    grid = _grid_from(args)
    pairs = _read_pairs(args)
    lats = np.array([st.lat for st, _ in pairs])
    lons = np.array([st.lon for st, _ in pairs])
    values = np.array([v for _, v in pairs])
    coincident = 0
    for i in range(len(pairs)):
        d = np.hypot(lats[:i] - lats[i], lons[:i] - lons[i])
        coincident += int(np.any(d < 1e-9))
    if coincident:
        print(f"krige: merging {coincident} duplicate measurement locations", file=sys.stderr)
    est = kriging_predict(ScatteredObs(lats=lats, lons=lons, values=values),
                          grid, _kriging_params(args))
    tio.write_grid(est, args.out)
    print(f"krige: M={len(pairs)} model={args.model} wrote {args.out}")
    return _EXIT_OK


def _write_eval_csv(path, method: str, points) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,count,trial,error\n")
        for pt in points:
            count = getattr(pt, "count", None)
            if count is None:
                count = pt.holdout
            for trial, err in enumerate(pt.errors):
                fh.write(f"{method},{count},{trial},{_fmt(err)}\n")


def cmd_eval_sweep(args) -> int:
    grid = _grid_from(args)
    stations = (tio.read_stations(args.stations) if args.stations
                else default_station_network(grid))
    result = sweep_observation_count(args.kind, stations, args.counts,
                                     trials=args.trials, seed=args.seed,
                                     params=_solver_params(args), grid=grid,
                                     jobs=args.jobs)
    print(f"sweep kind={args.kind.value} stations={len(stations)} "
          f"trials={args.trials} seed={args.seed}")
    print("count,mean_error")
    for pt in result.points:
        print(f"{pt.count},{pt.mean_error}")
    if args.out:
        _write_eval_csv(args.out, "cs", result.points)
    return _EXIT_OK


def cmd_eval_crosscheck(args) -> int:
    grid = _grid_from(args)
    if args.measurements:
        pairs = _read_pairs(args)
    elif args.kind is not None:
        pairs = station_measurements(args.kind, default_station_network(grid), grid)
    else:
        print("eval crosscheck: need --kind or --measurements", file=sys.stderr)
        return 2
    result = cross_check(pairs, args.holdouts, trials=args.trials, seed=args.seed,
                         method=args.method, params=_solver_params(args),
                         kriging_params=_kriging_params(args), grid=grid,
                         jobs=args.jobs)
    print(f"crosscheck method={args.method} measurements={len(pairs)} "
          f"trials={args.trials} seed={args.seed}")
    print("holdout,mean_error")
    for pt in result.points:
        print(f"{pt.holdout},{pt.mean_error}")
    if args.out:
        _write_eval_csv(args.out, args.method, result.points)
    return _EXIT_OK


def cmd_heatmap(args) -> int:
    tec_map = tio.read_grid(args.input)
    tio.write_heatmap(tec_map, args.out, vmin=args.vmin, vmax=args.vmax)
    print(f"heatmap: wrote {tec_map.grid.Q}x{tec_map.grid.P} image to {args.out}")
    return _EXIT_OK


def cmd_sparsity(args) -> int:
    grid = _grid_from(args)
    kinds = [args.kind] if args.kind else list(SyntheticKind)
    print(f"energy_fraction={args.energy_fraction}")
    print("kind,K")
    for kind in kinds:
        k = sparsity_level(dct2_forward(synth_map(kind, grid)), args.energy_fraction)
        print(f"{kind.value},{k}")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tecmap",
        description="Sparse spectral TEC map reconstruction and its Kriging baseline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write one synthetic map as a grid file")
    p.add_argument("--kind", type=_kind, required=True,
                   help="synthetic pattern: sm1..sm5")
    p.add_argument("--out", required=True, help="output grid file")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("reconstruct", help="reconstruct a map from measurements")
    p.add_argument("--measurements", required=True, help="measurement CSV")
    p.add_argument("--stations", help="station CSV for id-only measurements")
    p.add_argument("--out", required=True, help="output grid file")
    p.add_argument("--strict", action="store_true",
                   help="exit 4 if the solver did not converge")
    _add_grid_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("krige", help="baseline map from measurements by ordinary Kriging")
    p.add_argument("--measurements", required=True, help="measurement CSV")
    p.add_argument("--stations", help="station CSV for id-only measurements")
    p.add_argument("--out", required=True, help="output grid file")
    _add_grid_flags(p)
    _add_kriging_flags(p)
    p.set_defaults(func=cmd_krige)

    p = sub.add_parser("eval", help="experiment harness")
    esub = p.add_subparsers(dest="eval_command", required=True)

    e = esub.add_parser("sweep", help="error vs observation count on a synthetic map")
    e.add_argument("--kind", type=_kind, required=True)
    e.add_argument("--counts", type=_counts, default=[40, 70, 140],
                   help="comma-separated sample counts (default 40,70,140)")
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--jobs", type=int, default=1,
                   help="worker processes for trials (default 1)")
    e.add_argument("--stations", help="station CSV replacing the built-in network")
    e.add_argument("--out", help="per-trial CSV output path")
    _add_grid_flags(e)
    _add_solver_flags(e)
    e.set_defaults(func=cmd_eval_sweep)

    e = esub.add_parser("crosscheck", help="holdout validation, CS or Kriging")
    e.add_argument("--kind", type=_kind, help="synthetic pattern at the built-in network")
    e.add_argument("--measurements", help="real measurement CSV instead of --kind")
    e.add_argument("--stations", help="station CSV for id-only measurements")
    e.add_argument("--method", choices=("cs", "kriging"), default="cs")
    e.add_argument("--holdouts", type=_counts, default=[10, 20, 30],
                   help="comma-separated holdout counts (default 10,20,30)")
    e.add_argument("--trials", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--out", help="per-trial CSV output path")
    _add_grid_flags(e)
    _add_solver_flags(e)
    _add_kriging_flags(e)
    e.set_defaults(func=cmd_eval_crosscheck)

    p = sub.add_parser("heatmap", help="render a grid file to a PPM image")
    p.add_argument("--input", required=True, help="grid file")
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--vmin", type=float, required=True)
    p.add_argument("--vmax", type=float, required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("sparsity", help="sparsity levels of the synthetic maps")
    p.add_argument("--kind", type=_kind, default=None,
                   help="one pattern (default: all five)")
    p.add_argument("--energy-fraction", type=float, default=DEFAULT_ENERGY_FRACTION,
                   help=f"energy fraction defining K (default {DEFAULT_ENERGY_FRACTION})")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_sparsity)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TecMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
