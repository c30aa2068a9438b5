"""The eta-classical limit of the ratchet map.

With ``P = q + p`` the map per period is::

    P' = P - K dV_K/dq (q)
    q' = q + L dV_L/dP (P' + phi)
    p' = P' - q'

For ``V_K = V_L = cos`` this is ``P' = P + K sin q``,
``q' = q - L sin(P' + phi)``.  Coordinates are never range-reduced during
evolution; folding into the fundamental cell only happens in
:func:`portrait`.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import kernels
from .params import ScaledParams, wrap_angle
from .potential import Potential, cosine, potential_deriv

__all__ = [
    "ClassicalEnsemble",
    "classical_step",
    "make_ensemble",
    "ensemble_evolve",
    "portrait",
    "write_portrait_csv",
    "BLOCK_SIZE",
    "DEFAULT_ENSEMBLE",
]

DEFAULT_ENSEMBLE = 10**6
# Reductions are done per block, then blocks are summed in index order, so
# the result does not depend on how blocks are spread over workers.
BLOCK_SIZE = 16384


@dataclass
class ClassicalEnsemble:
    q: np.ndarray
    p: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.q = np.ascontiguousarray(self.q, dtype=np.float64)
        self.p = np.ascontiguousarray(self.p, dtype=np.float64)
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise ValueError("q and p must be 1-d arrays of equal length")

    @property
    def size(self) -> int:
        return self.q.shape[0]

    def copy(self) -> "ClassicalEnsemble":
        return ClassicalEnsemble(self.q.copy(), self.p.copy(), self.seed)

    def mirrored(self) -> "ClassicalEnsemble":
        """Reflect ``(q, p) -> (-q, -p)``; ``-q`` is ``2*pi - q`` on the circle."""
        return ClassicalEnsemble(-self.q, -self.p, self.seed)


def _defaults(v_k, v_l):
    return (v_k if v_k is not None else cosine(), v_l if v_l is not None else cosine())


def classical_step(q, p, params: ScaledParams, v_k: Potential | None = None,
                   v_l: Potential | None = None):
    """One period of the map; works on scalars or arrays."""
    v_k, v_l = _defaults(v_k, v_l)
    big_p = q + p - params.k_tilde * potential_deriv(v_k, q)
    q_new = q + params.l_tilde * potential_deriv(v_l.shifted(params.phi), big_p)
    return q_new, big_p - q_new


def make_ensemble(n: int, seed: int | None = 0, *, stratified: bool = False) -> ClassicalEnsemble:
    """``n`` particles on ``p = 0`` with ``q`` uniform on ``[0, 2 pi)``.

    ``stratified=True`` places them at equally spaced cell midpoints instead
    of sampling.
    """
    if n < 1:
        raise ValueError("ensemble size must be >= 1")
    if stratified:
        q = 2 * np.pi * (np.arange(n) + 0.5) / n
    else:
        q = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, n)
    return ClassicalEnsemble(q, np.zeros(n), seed)


def _term_arrays(v: Potential):
    return (np.ascontiguousarray(v.harmonics), np.ascontiguousarray(v.amplitudes),
            np.ascontiguousarray(v.phases))


def ensemble_evolve(e: ClassicalEnsemble, params: ScaledParams, v_k: Potential | None = None,
                    v_l: Potential | None = None, steps: int = 2000, *,
                    workers: int = 1, in_place: bool = False, backend=None) -> np.ndarray:
    """Mean momentum after each period, ``t = 0 .. steps``.

    The ensemble is copied unless ``in_place``.  Blocks of
    :data:`BLOCK_SIZE` particles run on a thread pool when ``workers > 1``
    (the compiled kernel releases the GIL); output does not depend on
    ``workers``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    k = backend if backend is not None else kernels
    v_k, v_l = _defaults(v_k, v_l)
    if not in_place:
        e = e.copy()
    mk, ak, ck = _term_arrays(v_k)
    ml, al, cl = _term_arrays(v_l.shifted(params.phi))
    starts = list(range(0, e.size, BLOCK_SIZE))
    partial = np.zeros((len(starts), steps + 1))

    def run(b):
        s = slice(starts[b], starts[b] + BLOCK_SIZE)
        q, p = e.q[s], e.p[s]
        k.classical_evolve(q, p, mk, ak, ck, ml, al, cl,
                           float(params.k_tilde), float(params.l_tilde), int(steps), partial[b])

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(starts))))
    else:
        for b in range(len(starts)):
            run(b)
    total = np.zeros(steps + 1)
    for b in range(len(starts)):
        total += partial[b]
    return total / e.size


def portrait(params: ScaledParams, v_k: Potential | None = None, v_l: Potential | None = None,
             n_init: int = 200, n_iter: int = 500) -> np.ndarray:
    """Iterate ``n_init`` initial conditions for ``n_iter`` periods.

    Initial points form a rank-1 (golden-ratio) lattice covering the cell
    ``[-pi, pi)^2``.  Returns an ``(n_init * n_iter, 2)`` array of
    ``(q, p)`` folded into ``[-pi, pi)^2``, grouped by trajectory, first row of
    each group being the initial point.
    """
    if n_init < 1 or n_iter < 1:
        raise ValueError("n_init and n_iter must be >= 1")
    i = np.arange(n_init)
    q = -np.pi + 2 * np.pi * (i + 0.5) / n_init
    golden = (math.sqrt(5.0) - 1) / 2
    p = -np.pi + 2 * np.pi * ((i * golden + 0.5) % 1.0)
    out = np.empty((n_init, n_iter, 2))
    for t in range(n_iter):
        out[:, t, 0] = q
        out[:, t, 1] = p
        q, p = classical_step(q, p, params, v_k, v_l)
    return wrap_angle(out).reshape(-1, 2)


def write_portrait_csv(points: np.ndarray, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "p"])
        for q, p in points.tolist():
            w.writerow([repr(q), repr(p)])
    return path
