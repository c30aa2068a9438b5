import math

import numpy as np
import pytest

from qratchet.analysis import classical_series, estimate_rate, quantum_series
from qratchet.params import ParameterError, ScaledParams
from qratchet.sweep import (Axis, RateGrid, ScanSpec, bucket_label, bucketize, point_seed,
                            run_scan, write_grid_csv)

HALF_PI = math.pi / 2
FIXED = ScaledParams(3.0, 1.0, 1.0, HALF_PI)


# -- bucketize --------------------------------------------------------------------

@pytest.mark.parametrize("rate,label", [
    (0.02, "1e-1.5"), (0.2, "1e-0.5"), (0.0, "1e-1.5"), (-0.2, "1e-0.5"),
    (10 ** -1.5, "1e-1.0"), (0.1, "1e-0.5"), (0.05, "1e-1.0"), (1.0, "1e0.5"), (5.0, "1e1.0"),
])
def test_bucket_labels(rate, label):
    assert bucket_label(rate) == label


def test_bucket_nan():
    assert bucket_label(math.nan) == ""


def test_bucketize_matrix():
    out = bucketize([[0.02, 0.2], [0.0, 3.0]])
    assert out.tolist() == [["1e-1.5", "1e-0.5"], ["1e-1.5", "1e0.5"]]


# -- ScanSpec validation ----------------------------------------------------------

def test_axis_needs_two_points():
    with pytest.raises(ParameterError):
        Axis("k_tilde", 1.0, 2.0, 1)


def test_axis_rejects_unknown_name():
    with pytest.raises(ParameterError):
        Axis("mass", 1.0, 2.0, 3)


def test_axes_must_be_distinct():
    with pytest.raises(ParameterError):
        ScanSpec((Axis("k_tilde", 1, 2, 2), Axis("k_tilde", 1, 2, 2)), FIXED)


def test_point_seed_stable_and_distinct():
    assert point_seed(7, 3) == point_seed(7, 3)
    assert len({point_seed(7, i) for i in range(100)}) == 100
    assert point_seed(7, 3) != point_seed(8, 3)


# -- run_scan ---------------------------------------------------------------------

def test_scan_points_equal_standalone_runs():
    spec = ScanSpec((Axis("k_tilde", 2.0, 3.0, 2),), FIXED, steps=400, window=(200, 400))
    grid = run_scan(spec)["quantum"]
    assert grid.rates.shape == (2,)
    for i, k in enumerate((2.0, 3.0)):
        est = estimate_rate(quantum_series(FIXED.replace(k_tilde=k), steps=400), (200, 400))
        assert grid.rates[i] == est.slope
        assert grid.fit_quality[i] == est.r_squared


def test_classical_scan_point_uses_derived_seed():
    spec = ScanSpec((Axis("l_tilde", 0.5, 1.0, 2),), FIXED, mode="classical", steps=50,
                    window=(10, 50), ensemble_size=2000, master_seed=4)
    grid = run_scan(spec)["classical"]
    s = classical_series(FIXED.replace(l_tilde=1.0), n=2000, steps=50, seed=point_seed(4, 1))
    assert grid.rates[1] == estimate_rate(s, (10, 50)).slope


def test_phi_scan_zero_phase():
    spec = ScanSpec((Axis("phi", -HALF_PI, HALF_PI, 3),), FIXED, steps=2000)
    grid = run_scan(spec)["quantum"]
    assert abs(grid.rates[1]) <= 1e-8
    assert grid.rates[0] == pytest.approx(-grid.rates[2], abs=1e-8)


def test_scan_both_modes_and_determinism():
    spec = ScanSpec((Axis("k_tilde", 1.0, 2.0, 2), Axis("l_tilde", 0.5, 1.0, 2)), FIXED,
                    mode="both", steps=60, window=(20, 60), ensemble_size=3000, master_seed=1)
    a = run_scan(spec)
    b = run_scan(spec, workers=2)
    assert set(a) == {"quantum", "classical"}
    for mode in a:
        assert a[mode].rates.shape == (2, 2)
        assert np.array_equal(a[mode].rates, b[mode].rates)
        assert np.array_equal(a[mode].fit_quality, b[mode].fit_quality)


def test_missing_point_recorded():
    spec = ScanSpec((Axis("k_tilde", 0.5, 60.0, 2),), FIXED.replace(l_tilde=0.5), steps=100,
                    window=(50, 100), basis_size=256, max_basis=256)
    grid = run_scan(spec)["quantum"]
    assert math.isnan(grid.rates[1])
    assert (1,) in grid.missing and "TruncationError" in grid.missing[(1,)]
    assert math.isfinite(grid.rates[0])


def test_beta_mean_scan_with_sample_time():
    spec = ScanSpec((Axis("beta_mean", 0.0, 0.5, 2),), ScaledParams(2.0, 1.0, 1.0, HALF_PI),
                    steps=7, sample_time=7, basis_size=256)
    grid = run_scan(spec)["quantum"]
    s = quantum_series(ScaledParams(2.0, 1.0, 1.0, HALF_PI), steps=7, basis_size=256, beta=0.5)
    assert grid.rates[1] == pytest.approx(s.values[7] - s.values[0], abs=1e-14)


def test_grid_csv(tmp_path):
    grid = RateGrid((("k_tilde", np.array([1.0, 2.0])), ("l_tilde", np.array([3.0]))),
                    np.array([[0.2], [math.nan]]), np.array([[0.99], [math.nan]]), "quantum")
    lines = write_grid_csv(grid, tmp_path / "g.csv").read_text().splitlines()
    assert lines == ["k_tilde,l_tilde,rate,r_squared,bucket",
                     "1.0,3.0,0.2,0.99,1e-0.5", "2.0,3.0,nan,nan,"]


# -- grid-level properties --------------------------------------------------------

@pytest.mark.slow
def test_classical_scarcity():
    axis = dict(min=0.25, max=8.0, points=8)
    spec = ScanSpec((Axis("k_tilde", **axis), Axis("l_tilde", **axis)), FIXED, mode="classical",
                    ensemble_size=10**4, master_seed=3)
    rates = run_scan(spec)["classical"].rates
    assert np.mean(np.abs(rates) >= 10 ** -1.5) < 0.30


@pytest.mark.slow
def test_dual_symmetry_in_full_chaos():
    axis = dict(min=3.0, max=8.0, points=6)
    spec = ScanSpec((Axis("k_tilde", **axis), Axis("l_tilde", **axis)), FIXED,
                    max_basis=2**16)
    grid = run_scan(spec)["quantum"]
    assert not grid.missing
    b = grid.buckets()
    assert np.mean(b == b.T) >= 0.8
