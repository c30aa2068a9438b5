"""Exit criteria, each run at its stated tolerance with one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from qratchet.analysis import (BetaDistribution, beta_averaged_series, classical_series,
                               estimate_rate, quantum_series, windowed_slope)
from qratchet.classical import classical_step
from qratchet.params import ANTI_RESONANCE, MAIN_RESONANCE, ScaledParams
from qratchet.potential import cosine, scenario_one_k, scenario_one_l
from qratchet.quantum import (EDGE_TOLERANCE, RatchetPropagator, evolve, grid_guard,
                              make_initial_state, resonance_phases)
from qratchet.sweep import Axis, ScanSpec, run_scan, write_grid_csv

from oracles import jacobian_det, period_matrix

pytestmark = pytest.mark.acceptance

HALF_PI = math.pi / 2
BUCKET_FLOOR = 10 ** -1.5


def test_c1_unitarity_and_truncation(criterion):
    t0 = time.perf_counter()
    ev = evolve(ScaledParams(3.0, 1.0, 1.0, HALF_PI), steps=2000, basis_size=4096)
    wall = time.perf_counter() - t0
    guard = grid_guard(ev.state)
    ok = (ev.norm_drift <= 1e-10 and ev.max_edge_population < EDGE_TOLERANCE and guard.ok
          and wall < 10)
    assert criterion("C1 unitarity & truncation", ok,
                     f"drift={ev.norm_drift:.2e} edge={guard.edge_population:.1e} "
                     f"N 4096->{ev.basis_size} growths={ev.growths} {wall:.1f}s")


def test_c2_dense_matrix_oracle(criterion):
    worst = 0.0
    wall = 0.0
    for n_basis in (4, 8, 16, 32):
        for params in (ScaledParams(1.0, 0.5, 1.0, HALF_PI), ScaledParams(3.0, 1.0, 0.7, 0.4),
                       ScaledParams(2.0, 2.5, 2 * math.pi / 3, HALF_PI, ANTI_RESONANCE)):
            u = period_matrix(params, cosine(), cosine(), n_basis)
            s = make_initial_state(0, n_basis, 0.0, params.hbar_tilde)
            t0 = time.perf_counter()
            prop = RatchetPropagator(params, basis_size=n_basis)
            c = s.to_fft_order()
            ref = s.amplitudes
            for _ in range(50):
                c, _ = prop.step(c)
                ref = u @ ref
                worst = max(worst, float(np.linalg.norm(np.fft.fftshift(c) - ref)))
            wall += time.perf_counter() - t0
    assert criterion("C2 dense-matrix oracle", worst <= 1e-10 and wall < 1,
                     f"max distance={worst:.2e} {wall:.2f}s")


def test_c3_symmetry_suite(criterion):
    t0 = time.perf_counter()
    sym = 0.0
    for phi in (0.0, math.pi):
        sym = max(sym, float(np.max(np.abs(evolve(ScaledParams(3.0, 1.0, 1.0, phi)).values))))
    a = evolve(ScaledParams(3.0, 1.0, 1.0, 1.0)).values
    b = evolve(ScaledParams(3.0, 1.0, 1.0, -1.0)).values
    anti = float(np.max(np.abs(a + b)))
    wall = time.perf_counter() - t0
    assert criterion("C3 symmetry suite", sym <= 1e-8 and anti <= 1e-9 and wall < 30,
                     f"max|<p>| at phi=0,pi: {sym:.1e}; max|p(phi)+p(-phi)|={anti:.1e} {wall:.1f}s")


def test_c4_symplecticity(criterion):
    rng = np.random.default_rng(2024)
    sets = [(ScaledParams(3.0, 1.0, 1.0, HALF_PI), None, None),
            (ScaledParams(4.0, 2.0, 1.0, HALF_PI), None, None),
            (ScaledParams(1.0, 0.5, 1.0, -0.7), None, None),
            (ScaledParams(8.0, 6.5, 1.0, 2.0), None, None),
            (ScaledParams(2.0, 1.0, 1.0, HALF_PI), scenario_one_k(0.5, -0.3), scenario_one_l())]
    t0 = time.perf_counter()
    worst = 0.0
    for params, vk, vl in sets:
        q = rng.uniform(-math.pi, math.pi, 100)
        p = rng.uniform(-math.pi, math.pi, 100)
        det = jacobian_det(lambda a, b: classical_step(a, b, params, vk, vl), q, p)
        worst = max(worst, float(np.max(np.abs(det - 1.0))))
    wall = time.perf_counter() - t0
    assert criterion("C4 classical symplecticity", worst <= 1e-6 and wall < 1,
                     f"max|det-1|={worst:.1e} {wall:.2f}s")


def test_c5_diagonal_suppression(criterion):
    t0 = time.perf_counter()
    rates = [estimate_rate(quantum_series(ScaledParams(k, k, 1.0, HALF_PI))).slope
             for k in (1.0, 2.0, 3.0)]
    wall = time.perf_counter() - t0
    ok = all(abs(r) < BUCKET_FLOOR for r in rates) and wall < 60
    assert criterion("C5 diagonal suppression", ok,
                     "R_q=" + ", ".join(f"{r:.2e}" for r in rates) + f" {wall:.1f}s")


def test_c6_full_chaos_quantum_violation(criterion):
    params = ScaledParams(4.0, 2.0, 1.0, HALF_PI)
    t0 = time.perf_counter()
    series = [classical_series(params, n=10**5, steps=2000, seed=seed) for seed in (1, 2)]
    peaks = [float(np.max(np.abs(s.values[:501]))) for s in series]
    r_c = estimate_rate(series[0]).slope
    r_q = estimate_rate(quantum_series(params)).slope
    wall = time.perf_counter() - t0
    null_current = all(p < 0.05 for p in peaks)
    violation = abs(r_q) > 10 * abs(r_c)
    ok = null_current and violation and wall < 120
    assert criterion("C6 full-chaos quantum violation", ok,
                     f"classical max|<p>| t<=500 seeds 1,2 = {peaks[0]:.3f}, {peaks[1]:.3f} "
                     f"(bound 0.05); R_q={r_q:.4f} R_c={r_c:.1e} {wall:.1f}s")


def test_c7_quantum_classical_correspondence(criterion):
    params = ScaledParams(3.0, 1.0, 0.05, HALF_PI)
    t0 = time.perf_counter()
    q = quantum_series(params, max_basis=2**19)
    r_q = estimate_rate(q).slope
    r_c = estimate_rate(classical_series(params, n=10**5, seed=1)).slope
    wall = time.perf_counter() - t0
    ok = abs(r_q - r_c) <= 0.2 * abs(r_c) and wall < 120
    assert criterion("C7 quantum-classical correspondence", ok,
                     f"R_q={r_q:.4f} R_c={r_c:.4f} |diff|={abs(r_q - r_c):.4f} "
                     f"<= {0.2 * abs(r_c):.4f}, N={q.info['basis_size']} {wall:.1f}s")


def test_c8_beta_spread_saturation(criterion):
    params = ScaledParams(2.0, 1.0, 1.0, HALF_PI)
    t0 = time.perf_counter()
    finals = {}
    ratio = math.nan
    for sigma in (0.0005, 0.001, 0.002, 0.004):
        s = beta_averaged_series(params, dist=BetaDistribution(0.0, sigma, 64), steps=200)
        finals[sigma] = float(s.values[200])
        if sigma == 0.002:
            ratio = windowed_slope(s.values, 100, 200) / windowed_slope(s.values, 0, 20)
    wall = time.perf_counter() - t0
    ordered = [finals[k] for k in sorted(finals)]
    monotone = all(a > b for a, b in zip(ordered, ordered[1:]))
    ok = ratio <= 0.2 and monotone and wall < 60
    assert criterion("C8 beta-spread saturation", ok,
                     f"slope ratio={ratio:.3f}; dp(200)=" + ", ".join(f"{v:.3f}" for v in ordered)
                     + f" {wall:.1f}s")


C9_AXIS = dict(min=0.5, max=6.0, points=12)


def _c9_spec():
    fixed = ScaledParams(1.0, 1.0, 2 * math.pi / 3, HALF_PI, ANTI_RESONANCE)
    return ScanSpec((Axis("k_tilde", **C9_AXIS), Axis("l_tilde", **C9_AXIS)), fixed)


@pytest.fixture(scope="module")
def c9_run(tmp_path_factory):
    t0 = time.perf_counter()
    grid = run_scan(_c9_spec(), workers=1)["quantum"]
    wall = time.perf_counter() - t0
    path = write_grid_csv(grid, tmp_path_factory.mktemp("c9") / "grid_w1.csv")
    return grid, path, wall


def test_c9_anti_resonance(criterion, c9_run):
    n = np.arange(-8, 9)
    parity = bool(np.all(resonance_phases(n, 0.0, ANTI_RESONANCE) == (-1.0) ** (n % 2)))
    wide = np.arange(-2**16, 2**16)
    parity_wide = bool(np.all(resonance_phases(wide, 0.0, ANTI_RESONANCE)
                              == np.where(wide % 2 == 0, 1.0, -1.0)))
    main = bool(np.all(resonance_phases(wide, 0.0, MAIN_RESONANCE) == 1.0))
    grid, _, wall = c9_run
    strong = int(np.sum(np.abs(grid.rates) >= 0.1))
    ok = parity and parity_wide and main and not grid.missing and strong >= 1 and wall < 600
    assert criterion("C9 anti-resonance", ok,
                     f"(-1)^n exact={parity and parity_wide}; cells >= 1e-1.0: {strong}/144; "
                     f"missing={len(grid.missing)} {wall:.0f}s")


def test_c10_determinism(criterion, c9_run, tmp_path):
    _, path1, _ = c9_run
    reference = path1.read_bytes()
    same = []
    for workers in (4, 8):
        grid = run_scan(_c9_spec(), workers=workers)["quantum"]
        same.append(write_grid_csv(grid, tmp_path / f"grid_w{workers}.csv").read_bytes() == reference)
    assert criterion("C10 determinism", all(same),
                     f"workers 1/4/8 bitwise-identical CSV: {dict(zip((4, 8), same))}")
