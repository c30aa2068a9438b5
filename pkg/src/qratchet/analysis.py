"""Current time series, acceleration-rate fits and quasi-momentum averaging."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .classical import ensemble_evolve, make_ensemble
from .params import ScaledParams
from .potential import Potential
from .quantum import DEFAULT_BASIS, MAX_BASIS, evolve

__all__ = [
    "CurrentSeries",
    "RateEstimate",
    "BetaDistribution",
    "DEFAULT_WINDOW",
    "quantum_series",
    "classical_series",
    "estimate_rate",
    "beta_averaged_series",
    "saturation_time",
    "windowed_slope",
    "write_series_csv",
]

DEFAULT_WINDOW = (1000, 2000)


@dataclass
class CurrentSeries:
    """Mean momentum sampled once per period from ``t = 0``."""

    values: np.ndarray
    kind: Literal["quantum", "classical"]
    params: ScaledParams
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values))


@dataclass(frozen=True)
class RateEstimate:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]


@dataclass(frozen=True)
class BetaDistribution:
    """Gaussian quasi-momentum spread: mean, standard deviation, node count."""

    mean: float = 0.0
    sigma: float = 0.0
    nodes: int = 64

    def __post_init__(self):
        if self.nodes < 1:
            raise ValueError("nodes must be >= 1")
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Hermite nodes ``mean + sqrt(2) sigma x_k``, weights ``w_k/sqrt(pi)``.

        ``sigma == 0`` collapses to the single node ``mean``.
        """
        if self.sigma == 0.0:
            return np.array([float(self.mean)]), np.array([1.0])
        x, w = np.polynomial.hermite.hermgauss(self.nodes)
        return self.mean + math.sqrt(2.0) * self.sigma * x, w / math.sqrt(math.pi)


def quantum_series(params: ScaledParams, v_k: Potential | None = None, v_l: Potential | None = None,
                   n0: int = 0, steps: int = 2000, basis_size: int = DEFAULT_BASIS, *,
                   beta: float = 0.0, max_basis: int = MAX_BASIS, check_every: int = 100,
                   auto_grow: bool = True) -> CurrentSeries:
    """Quantum ``<p(t)>`` from ``|n0>``; see :func:`qratchet.quantum.evolve`."""
    ev = evolve(params, v_k, v_l, steps, n0=n0, beta=beta, basis_size=basis_size,
                max_basis=max_basis, check_every=check_every, auto_grow=auto_grow)
    info = {"basis_size": ev.basis_size, "initial_basis_size": basis_size,
            "norm_drift": ev.norm_drift, "growths": ev.growths, "beta": beta, "n0": n0}
    return CurrentSeries(ev.values, "quantum", params, info)


def classical_series(params: ScaledParams, v_k: Potential | None = None, v_l: Potential | None = None,
                     n: int = 10**5, steps: int = 2000, seed: int | None = 0, *,
                     stratified: bool = False, workers: int = 1) -> CurrentSeries:
    """Ensemble-mean ``<p^c(t)>`` from the standard ``p = 0`` ensemble."""
    e = make_ensemble(n, seed, stratified=stratified)
    values = ensemble_evolve(e, params, v_k, v_l, steps, workers=workers, in_place=True)
    return CurrentSeries(values, "classical", params,
                         {"ensemble_size": n, "seed": seed, "stratified": stratified})


def _ols(t: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    tm, ym = t.mean(), y.mean()
    dt = t - tm
    slope = float(np.dot(dt, y - ym) / np.dot(dt, dt))
    intercept = float(ym - slope * tm)
    resid = y - (intercept + slope * t)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - ym, y - ym))
    scale = max(float(np.max(np.abs(y))), 1.0)
    if ss_tot <= (1e-14 * scale) ** 2 * len(y):
        r2 = 1.0 if ss_res <= (1e-12 * scale) ** 2 * len(y) else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def estimate_rate(s: CurrentSeries | np.ndarray, window: tuple[int, int] = DEFAULT_WINDOW) -> RateEstimate:
    """Least-squares line through ``(t, values[t])`` for ``t`` in ``[start, end)``."""
    values = s.values if isinstance(s, CurrentSeries) else np.asarray(s, dtype=np.float64)
    start, end = int(window[0]), int(window[1])
    if start < 0 or end - start < 2:
        raise ValueError(f"window {window} holds fewer than 2 samples")
    if end > len(values):
        raise ValueError(f"window {window} exceeds series length {len(values)}")
    t = np.arange(start, end, dtype=np.float64)
    slope, intercept, r2 = _ols(t, values[start:end])
    return RateEstimate(slope, intercept, r2, (start, end))


def windowed_slope(values: np.ndarray, start: int, end: int) -> float:
    """OLS slope over the closed range ``[start, end]``."""
    return estimate_rate(np.asarray(values), (start, end + 1)).slope


def _beta_component(args):
    params, v_k, v_l, beta, steps, basis_size, max_basis = args
    ev = evolve(params, v_k, v_l, steps, beta=beta, basis_size=basis_size, max_basis=max_basis)
    return ev.values - ev.values[0], ev.basis_size


def beta_averaged_series(params: ScaledParams, v_k: Potential | None = None,
                         v_l: Potential | None = None, dist: BetaDistribution = BetaDistribution(),
                         steps: int = 200, basis_size: int = 1024, *, max_basis: int = MAX_BASIS,
                         workers: int = 1) -> CurrentSeries:
    """Gaussian average over quasi-momentum of ``<p(t)> - <p(0)>``.

    Each node evolves ``|0>`` independently; the weighted sum is taken in node
    order so the result does not depend on ``workers``.
    """
    if dist.nodes < 1:
        raise ValueError("need at least one quadrature node")
    nodes, weights = dist.quadrature()
    jobs = [(params, v_k, v_l, float(b), steps, basis_size, max_basis) for b in nodes]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_beta_component, jobs))
    else:
        results = [_beta_component(j) for j in jobs]
    total = np.zeros(steps + 1)
    for w, (delta, _) in zip(weights, results):
        total += w * delta
    info = {"beta_mean": dist.mean, "beta_sigma": dist.sigma, "nodes": len(nodes),
            "node_values": nodes.tolist(), "basis_sizes": [r[1] for r in results]}
    return CurrentSeries(total, "quantum", params, info)


def saturation_time(s: CurrentSeries | np.ndarray, fraction: float = 0.2,
                    window: int = 20) -> int | None:
    """Earliest ``t`` whose forward slope over ``[t, t + window]`` falls below
    ``fraction`` times the slope over ``[0, window]``; ``None`` if never."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    values = s.values if isinstance(s, CurrentSeries) else np.asarray(s, dtype=np.float64)
    if len(values) < window + 1:
        return None
    initial = windowed_slope(values, 0, window)
    threshold = fraction * initial
    for t in range(1, len(values) - window):
        slope = windowed_slope(values, t, t + window)
        if (initial >= 0 and slope < threshold) or (initial < 0 and slope > threshold):
            return t
    return None


def write_series_csv(s: CurrentSeries | np.ndarray, path: str | Path) -> Path:
    """CSV with columns ``t, value``."""
    values = s.values if isinstance(s, CurrentSeries) else np.asarray(s)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in enumerate(values.tolist()):
            w.writerow([t, repr(v)])
    return path
