"""The five built-in ionosphere patterns and their spectral footprints."""
import math

import numpy as np
import pytest

from tecmap.dct import dct2_forward, sparsity_level
from tecmap.grid import DEFAULT_GRID, Grid
from tecmap.synthetic import (NOMINAL_SPARSITY, SyntheticKind, synth_map,
                              synth_value, synthetic_sparsity_table)


@pytest.mark.parametrize("kind", list(SyntheticKind))
def test_patterns_are_positive_and_tec_scaled(kind):
    v = synth_map(kind, DEFAULT_GRID).values
    assert np.all(v > 0), "TEC is a column density; negative values are unphysical"
    assert np.all(v < 100), "regional midlatitude TEC stays well under 100 TECU"


def test_spot_values_match_hand_evaluation():
    # Each formula evaluated longhand at one off-node point.
    phi, lam = 36.2, 40.7
    assert synth_value(SyntheticKind.SM1, phi, lam) == pytest.approx(
        25.0 - 0.3 * 36.2 + 0.3 * 40.7)
    assert synth_value(SyntheticKind.SM2, phi, lam) == pytest.approx(
        25.0 - 0.3 * (36.2 - 34.0) ** 2 + 0.3 * (40.7 - 35.0) ** 2)
    assert synth_value(SyntheticKind.SM3, phi, lam) == pytest.approx(
        20.0 + 5.0 * math.exp(-((36.2 - 34.0) / 10.0) ** 2 - ((40.7 - 35.0) / 7.0) ** 2))
    assert synth_value(SyntheticKind.SM4, phi, lam) == pytest.approx(
        21.0 + 6.0 * math.sqrt(math.cos(1.2) ** 2 + math.sin(8.7) ** 2)
        - 6.0 * math.exp(0.25 * (math.cos(1.2) + math.cos(8.7))))
    assert synth_value(SyntheticKind.SM5, phi, lam) == pytest.approx(
        46.0 - 0.3 * 36.2 - 0.3 * 40.7 + 0.5 * math.cos(1.5 * (40.7 - 36.2)))


def test_sm3_peaks_at_its_gaussian_center():
    m = synth_map(SyntheticKind.SM3, DEFAULT_GRID)
    p, q = np.unravel_index(np.argmax(m.values), m.values.shape)
    assert DEFAULT_GRID.lat(p) == pytest.approx(34.0)
    assert DEFAULT_GRID.lon(q) == pytest.approx(35.0)
    assert m.values[p, q] == pytest.approx(25.0)


def test_trig_arguments_are_raw_degree_differences():
    # cos(phi - 35) is the cosine of the numeric difference itself: the
    # sin^2 disturbance then has a ~3.1-degree longitude period, giving
    # several full cycles across the region.  Converting the difference to
    # radians first would stretch one period over ~180 degrees and leave
    # an essentially monotone profile.
    lons = np.arange(26.0, 44.6, 0.3)
    vals = synth_value(SyntheticKind.SM4, 35.0, lons)

    def crossings(v):
        return int(np.sum(np.diff(np.sign(v - v.mean())) != 0))

    converted = (21.0
                 + 6.0 * np.sqrt(np.cos(np.radians(0.0)) ** 2
                                 + np.sin(np.radians(lons - 32.0)) ** 2)
                 - 6.0 * np.exp(0.25 * (np.cos(np.radians(0.0))
                                        + np.cos(np.radians(lons - 32.0)))))
    assert crossings(vals) >= 4
    assert crossings(converted) <= 2


def test_map_matches_pointwise_evaluation():
    g = Grid(lat_min=30.0, lon_min=20.0, dlat=0.5, dlon=0.5, P=7, Q=9)
    for kind in SyntheticKind:
        m = synth_map(kind, g)
        for p in (0, 3, 6):
            for q in (0, 4, 8):
                assert m.values[p, q] == pytest.approx(
                    float(synth_value(kind, g.lat(p), g.lon(q))), rel=1e-14)


def test_sparsity_table_regression():
    # Regression freeze at the calibrated default energy fraction.
    got = dict(synthetic_sparsity_table())
    assert got == {
        SyntheticKind.SM1: 3,
        SyntheticKind.SM2: 15,
        SyntheticKind.SM3: 4,
        SyntheticKind.SM4: 27,
        SyntheticKind.SM5: 8,
    }


def test_sm1_concentrates_energy_in_three_coefficients():
    c = dct2_forward(synth_map(SyntheticKind.SM1, DEFAULT_GRID))
    assert sparsity_level(c, 0.9999) == 3
    top3 = np.sort(c.s**2)[-3:].sum()
    assert top3 / np.sum(c.s**2) > 0.9999


def test_nominal_sparsity_covers_every_kind():
    assert set(NOMINAL_SPARSITY) == set(SyntheticKind)
    assert all(k >= 1 for k in NOMINAL_SPARSITY.values())
