"""Ordinary-Kriging baseline: variogram machinery and prediction."""
import numpy as np
import pytest

from tecmap.evaluation import normalized_error_energy
from tecmap.exceptions import (DegenerateInputError, FitError, ParameterError)
from tecmap.grid import DEFAULT_GRID, Grid
from tecmap.kriging import (KrigingParams, ScatteredObs, SemivariogramModel,
                            empirical_semivariogram, fit_semivariogram,
                            idw_densify, kriging_predict, kriging_weights,
                            merge_coincident, ordinary_kriging)
from tecmap.synthetic import SyntheticKind, synth_map, synth_value


def scattered(seed, n, box=(0.0, 4.0, 0.0, 4.0)):
    rng = np.random.default_rng(seed)
    lat0, lat1, lon0, lon1 = box
    return ScatteredObs(lats=rng.uniform(lat0, lat1, n),
                        lons=rng.uniform(lon0, lon1, n),
                        values=rng.uniform(1.0, 9.0, n))


# --- Semivariogram model --------------------------------------------------

def test_semivariance_zero_at_zero_lag():
    m = SemivariogramModel(kind="spherical", nugget=0.5, sill=3.0, range=2.0)
    assert m.semivariance(np.array([0.0]))[0] == 0.0
    # ... but jumps to the nugget immediately off zero.
    assert m.semivariance(np.array([1e-12]))[0] == pytest.approx(0.5, abs=1e-9)


def test_spherical_reaches_sill_at_range():
    m = SemivariogramModel(kind="spherical", nugget=0.2, sill=4.0, range=3.0)
    d = np.array([3.0, 5.0, 100.0])
    assert np.allclose(m.semivariance(d), 4.0)
    inside = m.semivariance(np.array([1.0]))[0]
    assert 0.2 < inside < 4.0


@pytest.mark.parametrize("kind", ["spherical", "exponential", "gaussian"])
def test_semivariance_monotone_nondecreasing(kind):
    m = SemivariogramModel(kind=kind, nugget=0.1, sill=2.0, range=2.5)
    d = np.linspace(1e-6, 10.0, 400)
    g = m.semivariance(d)
    assert np.all(np.diff(g) >= -1e-12)
    assert g[-1] == pytest.approx(2.0, rel=1e-3)


def test_model_validation():
    with pytest.raises(ParameterError):
        SemivariogramModel(kind="cubic", nugget=0.0, sill=1.0, range=1.0)
    with pytest.raises(ParameterError):
        SemivariogramModel(kind="spherical", nugget=2.0, sill=1.0, range=1.0)
    with pytest.raises(ParameterError):
        SemivariogramModel(kind="spherical", nugget=0.0, sill=1.0, range=0.0)


# --- IDW densification ----------------------------------------------------

def test_idw_adds_bounded_pseudo_observations():
    g = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=5, Q=5)
    obs = scattered(1, 12)
    dense = idw_densify(obs, g, power=2.0, target_spacing=1.0)
    assert dense.n == obs.n + 25            # 5x5 lattice over the box
    pseudo = dense.values[obs.n:]
    assert pseudo.min() >= obs.values.min() - 1e-12
    assert pseudo.max() <= obs.values.max() + 1e-12


def test_idw_copies_value_at_coincident_point():
    g = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=3, Q=3)
    obs = ScatteredObs(lats=np.array([1.0, 0.3]), lons=np.array([2.0, 1.7]),
                       values=np.array([5.5, 1.0]))
    dense = idw_densify(obs, g, target_spacing=1.0)
    # Lattice point (1, 2) coincides with the first observation.
    i = obs.n + 1 * 3 + 2
    assert dense.lats[i] == 1.0 and dense.lons[i] == 2.0
    assert dense.values[i] == 5.5


def test_idw_weights_favor_the_nearest_observation():
    g = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=2, Q=2)
    obs = ScatteredObs(lats=np.array([0.1, 0.9]), lons=np.array([0.1, 0.9]),
                       values=np.array([0.0, 10.0]))
    dense = idw_densify(obs, g, power=2.0, target_spacing=1.0)
    corner_near_first = dense.values[obs.n + 0]      # lattice (0, 0)
    corner_near_second = dense.values[obs.n + 3]     # lattice (1, 1)
    assert corner_near_first < 5.0 < corner_near_second


# --- Empirical semivariogram ----------------------------------------------

def brute_semivariogram(obs, n_bins, max_lag):
    pairs = []
    for i in range(obs.n):
        for j in range(i + 1, obs.n):
            d = np.hypot(obs.lats[i] - obs.lats[j], obs.lons[i] - obs.lons[j])
            if d <= max_lag:
                pairs.append((d, (obs.values[i] - obs.values[j]) ** 2))
    edges = np.linspace(0.0, max_lag, n_bins + 1)
    out = []
    for b in range(n_bins):
        sel = [(d, sq) for d, sq in pairs
               if (edges[b] < d <= edges[b + 1]) or (b == 0 and d <= edges[1])]
        if not sel:
            continue
        ds = [d for d, _ in sel]
        sqs = [sq for _, sq in sel]
        out.append((sum(ds) / len(ds), sum(sqs) / (2 * len(sqs)), len(sel)))
    return out


def test_empirical_semivariogram_matches_bruteforce():
    obs = scattered(3, 25)
    got = empirical_semivariogram(obs, n_bins=8, max_lag=3.0)
    want = brute_semivariogram(obs, 8, 3.0)
    assert len(got) == len(want)
    for (lg, gg, cg), (lw, gw, cw) in zip(got, want):
        assert cg == cw
        assert lg == pytest.approx(lw, rel=1e-12)
        assert gg == pytest.approx(gw, rel=1e-12)


def test_empirical_semivariogram_default_max_lag_is_half_extent():
    obs = scattered(5, 30)
    iu, ju = np.triu_indices(obs.n, k=1)
    dmax = np.hypot(obs.lats[iu] - obs.lats[ju], obs.lons[iu] - obs.lons[ju]).max()
    bins = empirical_semivariogram(obs, n_bins=10)
    assert bins[-1][0] <= 0.5 * dmax + 1e-12


def test_empirical_semivariogram_rejects_degenerate_input():
    with pytest.raises(DegenerateInputError):
        empirical_semivariogram(ScatteredObs(lats=np.array([1.0]),
                                             lons=np.array([1.0]),
                                             values=np.array([2.0])))
    same = ScatteredObs(lats=np.array([1.0, 1.0]), lons=np.array([2.0, 2.0]),
                        values=np.array([1.0, 3.0]))
    with pytest.raises(DegenerateInputError):
        empirical_semivariogram(same)


# --- Model fitting ----------------------------------------------------------

def test_fit_recovers_noiseless_model():
    truth = SemivariogramModel(kind="spherical", nugget=0.3, sill=4.0, range=2.5)
    lags = np.linspace(0.2, 5.0, 12)
    bins = [(float(l), float(truth.semivariance(np.array([l]))[0]), 40) for l in lags]
    fit = fit_semivariogram(bins, kind="spherical")
    assert fit.nugget == pytest.approx(0.3, abs=1e-3)
    assert fit.sill == pytest.approx(4.0, abs=1e-3)
    assert fit.range == pytest.approx(2.5, abs=1e-2)


def test_fit_never_worse_than_its_grid_seed():
    obs = scattered(11, 40)
    bins = empirical_semivariogram(obs, n_bins=10)
    lags = np.array([b[0] for b in bins])
    gammas = np.array([b[1] for b in bins])
    weights = np.sqrt(np.array([b[2] for b in bins], dtype=float))

    def sse(model):
        return float(np.sum((weights * (model.semivariance(lags) - gammas)) ** 2))

    fitted = sse(fit_semivariogram(bins, kind="spherical"))
    gmax, lmax = float(gammas.max()), float(lags.max())
    grid_best = min(
        sse(SemivariogramModel(kind="spherical", nugget=fn * gmax,
                               sill=fn * gmax + fp * gmax, range=max(fr * lmax, 1e-6)))
        for fn in (0.0, 0.25, 0.5)
        for fp in (0.25, 0.5, 0.75, 1.0, 1.25)
        for fr in (0.25, 0.5, 0.75, 1.0, 1.5))
    assert fitted <= grid_best + 1e-9


def test_fit_requires_three_bins():
    with pytest.raises(FitError):
        fit_semivariogram([(0.5, 1.0, 3), (1.0, 2.0, 3)])


# --- Kriging ---------------------------------------------------------------

def test_merge_coincident_averages_duplicates():
    obs = ScatteredObs(lats=np.array([1.0, 2.0, 1.0]),
                       lons=np.array([3.0, 4.0, 3.0]),
                       values=np.array([2.0, 7.0, 4.0]))
    merged = merge_coincident(obs)
    assert merged.n == 2
    at = {(la, lo): v for la, lo, v in zip(merged.lats, merged.lons, merged.values)}
    assert at[(1.0, 3.0)] == pytest.approx(3.0)
    assert at[(2.0, 4.0)] == 7.0


def test_kriging_weights_align_with_caller_order_under_duplicates():
    obs = ScatteredObs(lats=np.array([2.0, 0.5, 2.0]),
                       lons=np.array([1.0, 3.0, 1.0]),
                       values=np.array([4.0, 8.0, 6.0]))
    model = SemivariogramModel(kind="spherical", nugget=0.1, sill=2.0, range=2.0)
    w, _ = kriging_weights(obs, model, 1.3, 2.2)
    merged = merge_coincident(obs)
    wm, _ = kriging_weights(merged, model, 1.3, 2.2)
    assert w.shape == (3,)
    assert w[0] == pytest.approx(w[2])       # the duplicate pair shares its weight
    assert float(w @ obs.values) == pytest.approx(float(wm @ merged.values), rel=1e-12)


def test_kriging_weights_sum_to_one():
    obs = scattered(7, 15)
    model = SemivariogramModel(kind="spherical", nugget=0.2, sill=2.0, range=2.0)
    for lat, lon in ((0.5, 0.5), (2.0, 3.1), (3.9, 0.2)):
        w, _ = kriging_weights(obs, model, lat, lon)
        assert abs(w.sum() - 1.0) < 1e-8


def test_exact_interpolation_at_zero_nugget():
    obs = scattered(9, 10)
    model = SemivariogramModel(kind="spherical", nugget=0.0, sill=3.0, range=2.0)
    for i in (0, 4, 9):
        w, _ = kriging_weights(obs, model, float(obs.lats[i]), float(obs.lons[i]))
        assert abs(float(w @ obs.values) - float(obs.values[i])) < 1e-6


def test_grid_prediction_matches_per_point_weights():
    g = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=4, Q=5)
    obs = scattered(13, 12)
    model = SemivariogramModel(kind="exponential", nugget=0.1, sill=2.5, range=1.5)
    pred = ordinary_kriging(obs, model, g)
    for p, q in ((0, 0), (2, 3), (3, 4)):
        w, _ = kriging_weights(obs, model, g.lat(p), g.lon(q))
        assert pred.values[p, q] == pytest.approx(float(w @ obs.values), rel=1e-9)


def test_constant_field_predicts_constant():
    obs = ScatteredObs(lats=np.array([0.5, 1.5, 2.5, 3.0]),
                       lons=np.array([1.0, 3.0, 0.5, 2.0]),
                       values=np.full(4, 6.25))
    g = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=4, Q=4)
    model = SemivariogramModel(kind="spherical", nugget=0.3, sill=1.3, range=2.0)
    pred = ordinary_kriging(obs, model, g)
    assert np.allclose(pred.values, 6.25, atol=1e-8)


def test_pipeline_is_translation_invariant():
    g0 = Grid(lat_min=0.0, lon_min=0.0, dlat=1.0, dlon=1.0, P=5, Q=6)
    g1 = Grid(lat_min=7.0, lon_min=-3.0, dlat=1.0, dlon=1.0, P=5, Q=6)
    obs = scattered(17, 14, box=(0.0, 4.0, 0.0, 5.0))
    moved = ScatteredObs(lats=obs.lats + 7.0, lons=obs.lons - 3.0, values=obs.values)
    a = kriging_predict(obs, g0)
    b = kriging_predict(moved, g1)
    assert np.allclose(a.values, b.values, atol=1e-8)


def test_pipeline_recovers_smooth_synthetic_map():
    net_rng = np.random.default_rng(29)
    g = DEFAULT_GRID
    lats = net_rng.uniform(g.lat_min, g.lat_max, 120)
    lons = net_rng.uniform(g.lon_min, g.lon_max, 120)
    values = synth_value(SyntheticKind.SM3, lats, lons)
    pred = kriging_predict(ScatteredObs(lats=lats, lons=lons, values=values), g)
    err = normalized_error_energy(synth_map(SyntheticKind.SM3, g), pred)
    assert err < 1e-3


def test_kriging_params_validation():
    with pytest.raises(ParameterError):
        KrigingParams(idw_power=0.0)
    with pytest.raises(ParameterError):
        KrigingParams(n_bins=2)
    with pytest.raises(ParameterError):
        KrigingParams(model_kind="linear")
    with pytest.raises(ParameterError):
        KrigingParams(max_lag=-1.0)
