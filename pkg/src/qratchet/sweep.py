"""Parameter scans of the acceleration rate, run over a process pool."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .analysis import (DEFAULT_WINDOW, BetaDistribution, beta_averaged_series, classical_series,
                       estimate_rate, quantum_series)
from .params import ParameterError, ScaledParams
from .potential import Potential
from .quantum import DEFAULT_BASIS, MAX_BASIS, TruncationError

__all__ = [
    "Axis",
    "ScanSpec",
    "RateGrid",
    "SCAN_PARAMETERS",
    "run_scan",
    "bucketize",
    "bucket_label",
    "point_seed",
    "write_grid_csv",
]

SCAN_PARAMETERS = ("k_tilde", "l_tilde", "hbar_tilde", "phi", "beta_mean")
LOWEST_EDGE = -1.5


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.name not in SCAN_PARAMETERS:
            raise ParameterError("axes", f"unknown scan parameter {self.name!r}; choose from {SCAN_PARAMETERS}")
        if self.points < 2:
            raise ParameterError("axes", f"axis {self.name!r} needs at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class ScanSpec:
    """A 1-d or 2-d scan over named parameters around ``fixed``.

    ``sample_time`` switches the observable from the fitted slope to
    ``<p(sample_time)> - <p(0)>`` (used for quasi-momentum scans).
    """

    axes: tuple[Axis, ...]
    fixed: ScaledParams
    mode: Literal["quantum", "classical", "both"] = "quantum"
    steps: int = 2000
    window: tuple[int, int] = DEFAULT_WINDOW
    v_k: Potential | None = None
    v_l: Potential | None = None
    basis_size: int = DEFAULT_BASIS
    max_basis: int = MAX_BASIS
    ensemble_size: int = 10**5
    master_seed: int = 0
    beta: BetaDistribution = field(default_factory=lambda: BetaDistribution(0.0, 0.0, 64))
    sample_time: int | None = None

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ParameterError("axes", "need 1 or 2 axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ParameterError("axes", "axes must reference distinct parameters")
        if self.mode not in ("quantum", "classical", "both"):
            raise ParameterError("mode", f"unknown mode {self.mode!r}")
        if self.sample_time is None and self.window[1] > self.steps + 1:
            raise ParameterError("window", f"window {self.window} exceeds steps={self.steps}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.points for a in self.axes)

    @property
    def modes(self) -> tuple[str, ...]:
        return ("quantum", "classical") if self.mode == "both" else (self.mode,)


@dataclass
class RateGrid:
    axes: tuple[tuple[str, np.ndarray], ...]
    rates: np.ndarray
    fit_quality: np.ndarray
    mode: str
    missing: dict[tuple[int, ...], str] = field(default_factory=dict)

    def buckets(self) -> np.ndarray:
        return bucketize(self.rates)


def point_seed(master_seed: int, index: int) -> int:
    """Per-point RNG seed derived from the master seed and flat point index."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _point_params(spec: ScanSpec, coords: dict[str, float]) -> tuple[ScaledParams, float]:
    changes = {k: v for k, v in coords.items() if k != "beta_mean"}
    beta_mean = coords.get("beta_mean", spec.beta.mean)
    return spec.fixed.replace(**changes), beta_mean


def _evaluate(job):
    spec, mode, index, coords = job
    try:
        params, beta_mean = _point_params(spec, coords)
        if mode == "classical":
            s = classical_series(params, spec.v_k, spec.v_l, spec.ensemble_size,
                                 spec.steps, point_seed(spec.master_seed, index))
        elif spec.beta.sigma > 0:
            dist = BetaDistribution(beta_mean, spec.beta.sigma, spec.beta.nodes)
            s = beta_averaged_series(params, spec.v_k, spec.v_l, dist, spec.steps,
                                     spec.basis_size, max_basis=spec.max_basis)
        else:
            s = quantum_series(params, spec.v_k, spec.v_l, 0, spec.steps, spec.basis_size,
                               beta=beta_mean, max_basis=spec.max_basis)
        if spec.sample_time is not None:
            return index, float(s.values[spec.sample_time] - s.values[0]), math.nan, None
        est = estimate_rate(s, spec.window)
        return index, est.slope, est.r_squared, None
    except (TruncationError, ParameterError, FloatingPointError) as exc:
        return index, math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def run_scan(spec: ScanSpec, workers: int = 1) -> dict[str, RateGrid]:
    """Evaluate every grid point; returns one :class:`RateGrid` per mode.

    Points are keyed by flat index, so the result is identical for any
    ``workers``.  Failing points become NaN with a recorded reason.
    """
    shape = spec.shape
    axis_values = [a.values() for a in spec.axes]
    jobs = []
    for mode in spec.modes:
        for index, multi in enumerate(np.ndindex(*shape)):
            coords = {a.name: float(v[i]) for a, v, i in zip(spec.axes, axis_values, multi)}
            jobs.append((spec, mode, index, coords))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=1))
    else:
        results = [_evaluate(j) for j in jobs]

    grids = {}
    per_mode = len(jobs) // len(spec.modes)
    for m, mode in enumerate(spec.modes):
        rates = np.full(shape, math.nan)
        quality = np.full(shape, math.nan)
        missing = {}
        for index, rate, r2, reason in results[m * per_mode:(m + 1) * per_mode]:
            multi = np.unravel_index(index, shape)
            rates[multi] = rate
            quality[multi] = r2
            if reason is not None:
                missing[tuple(int(i) for i in multi)] = reason
        grids[mode] = RateGrid(tuple((a.name, v) for a, v in zip(spec.axes, axis_values)),
                               rates, quality, mode, missing)
    return grids


def bucket_label(rate: float) -> str:
    """Half-decade contour bucket of ``|rate|``, labelled by its upper edge.

    Everything below ``10**-1.5`` (including 0) is ``"1e-1.5"``; NaN gives ``""``.
    """
    if math.isnan(rate):
        return ""
    r = abs(rate)
    if r < 10 ** LOWEST_EDGE:
        return f"1e{LOWEST_EDGE:.1f}"
    k = math.floor(2 * math.log10(r))
    # guard the log against rounding right at an edge
    if r < 10 ** (k / 2):
        k -= 1
    elif r >= 10 ** ((k + 1) / 2):
        k += 1
    return f"1e{(k + 1) / 2:.1f}"


def bucketize(rates) -> np.ndarray:
    arr = np.asarray(rates, dtype=np.float64)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(*arr.shape):
        out[idx] = bucket_label(float(arr[idx]))
    return out


def write_grid_csv(grid: RateGrid, path: str | Path) -> Path:
    """Long-format CSV: one column per axis, then ``rate, r_squared, bucket``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [name for name, _ in grid.axes]
    buckets = grid.buckets()
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([*names, "rate", "r_squared", "bucket"])
        for multi in np.ndindex(*grid.rates.shape):
            coords = [repr(float(values[i])) for (_, values), i in zip(grid.axes, multi)]
            w.writerow([*coords, repr(float(grid.rates[multi])),
                        repr(float(grid.fit_quality[multi])), buckets[multi]])
    return path


def spec_to_dict(spec: ScanSpec) -> dict:
    d = asdict(spec)
    d["fixed"]["resonance"] = [spec.fixed.resonance.nu, spec.fixed.resonance.mu]
    d["v_k"] = spec.v_k.to_triples() if spec.v_k else None
    d["v_l"] = spec.v_l.to_triples() if spec.v_l else None
    return d
