"""Split-operator propagation of the resonance-reduced ratchet map.

One kick period is, right to left::

    R_beta * exp(+i p^2 / 2hbar) * exp(-i (L/hbar) V_L(q + phi))
           * exp(-i p^2 / 2hbar) * exp(-i (K/hbar) V_K(q))

with ``p = (n + beta) * hbar`` and the resonance factor
``R_beta = exp(-i 2 pi (nu/mu) (n + beta)^2)``, which is the identity on the
main resonance at ``beta = 0``.  Kicks are applied on the position grid
``q_j = 2 pi j / N``; momentum indices run over ``[-N/2, N/2)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from ._backend import kernels
from .params import MAIN_RESONANCE, ResonanceOrder, ScaledParams
from .potential import Potential, cosine, potential_eval

__all__ = [
    "QuantumState",
    "GuardReport",
    "TruncationError",
    "RatchetPropagator",
    "Evolution",
    "make_initial_state",
    "apply_kick",
    "apply_free",
    "apply_resonance_phase",
    "ratchet_step",
    "momentum_expectation",
    "grid_guard",
    "evolve",
    "write_distribution_csv",
    "DEFAULT_BASIS",
    "MAX_BASIS",
    "EDGE_TOLERANCE",
]

DEFAULT_BASIS = 4096
MAX_BASIS = 2**16
EDGE_TOLERANCE = 1e-10
EDGE_FRACTION = 0.10

_TWO_PI_LD = np.longdouble("6.28318530717958647692528676655900577")


class TruncationError(RuntimeError):
    """The state reached the edge of the largest permitted momentum basis."""

    def __init__(self, message: str, *, time: int | None = None, basis_size: int | None = None,
                 edge_population: float | None = None):
        super().__init__(message)
        self.time = time
        self.basis_size = basis_size
        self.edge_population = edge_population


def _check_basis(n: int) -> int:
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ValueError(f"basis size must be a power of two >= 2, got {n}")
    return n


def momentum_indices(n_basis: int) -> np.ndarray:
    """Momentum quantum numbers in natural order, ``[-N/2, N/2)``."""
    return np.arange(-(n_basis // 2), n_basis // 2, dtype=np.int64)


def _fft_indices(n_basis: int) -> np.ndarray:
    return np.fft.ifftshift(momentum_indices(n_basis))


@dataclass
class QuantumState:
    """Amplitudes ``c_n`` over ``n = -N/2 .. N/2-1`` (natural order)."""

    amplitudes: np.ndarray
    beta: float = 0.0
    hbar_tilde: float = 1.0

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        _check_basis(self.amplitudes.shape[0])
        # beta outside [0, 1) is allowed: only its value mod 1 matters physically
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")

    @property
    def basis_size(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n(self) -> np.ndarray:
        return momentum_indices(self.basis_size)

    @property
    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.beta, self.hbar_tilde)

    def with_amplitudes(self, amplitudes: np.ndarray) -> "QuantumState":
        return QuantumState(amplitudes, self.beta, self.hbar_tilde)

    def grown(self, factor: int = 2) -> "QuantumState":
        """Embed in a basis ``factor`` times larger, zero padded at both ends."""
        n = self.basis_size
        out = np.zeros(n * factor, dtype=np.complex128)
        off = (n * factor - n) // 2
        out[off:off + n] = self.amplitudes
        return self.with_amplitudes(out)

    def to_fft_order(self) -> np.ndarray:
        return np.fft.ifftshift(self.amplitudes)


def make_initial_state(n0: int = 0, basis_size: int = DEFAULT_BASIS, beta: float = 0.0,
                       hbar_tilde: float = 1.0) -> QuantumState:
    """Momentum eigenstate ``|n0>``."""
    basis_size = _check_basis(basis_size)
    if not -(basis_size // 2) <= n0 < basis_size // 2:
        raise ValueError(f"n0={n0} outside basis [-{basis_size // 2}, {basis_size // 2})")
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    amps = np.zeros(basis_size, dtype=np.complex128)
    amps[n0 + basis_size // 2] = 1.0
    return QuantumState(amps, float(beta), float(hbar_tilde))


# -- phase tables (FFT order unless stated) ------------------------------------

def kick_phases(v: Potential, strength: float, basis_size: int) -> np.ndarray:
    """``exp(-i strength V(q_j))`` on the position grid."""
    q = 2 * np.pi * np.arange(basis_size) / basis_size
    return np.exp(-1j * strength * potential_eval(v, q))


def free_phases(n: np.ndarray, beta: float, hbar_tilde: float, sign: int = 1) -> np.ndarray:
    """``exp(-i sign (n+beta)^2 hbar/2)``; argument reduced in long double."""
    x = (n.astype(np.longdouble) + np.longdouble(beta)) ** 2 * np.longdouble(hbar_tilde) / 2
    x = np.fmod(x, _TWO_PI_LD).astype(np.float64)
    return np.exp(-1j * sign * x)


def resonance_phases(n: np.ndarray, beta: float, resonance: ResonanceOrder) -> np.ndarray:
    """``exp(-i 2 pi (nu/mu) (n+beta)^2)``.

    ``nu*n^2 mod mu`` is taken in integer arithmetic so large ``|n|`` does
    not cost precision; the remaining ``2 n beta + beta^2`` part is small.
    """
    nu, mu = resonance.nu, resonance.mu
    n = n.astype(np.int64)
    residue = (nu * (n * n % mu)) % mu
    if beta == 0.0:
        # a table of mu-th roots of unity, exact at the quarter turns
        k = np.arange(mu)
        table = np.exp(-2j * np.pi * k / mu)
        for num, val in ((0, 1.0), (1, -1j), (2, -1.0), (3, 1j)):
            hit = 4 * k == num * mu
            table[hit] = val
        return table[residue]
    frac = residue / mu + (nu / mu) * (2.0 * n * beta + beta * beta)
    frac = frac - np.floor(frac)
    return np.exp(-2j * np.pi * frac)


# -- single operations on QuantumState ------------------------------------------

def _kick_fft_order(c: np.ndarray, phases: np.ndarray) -> np.ndarray:
    psi = sfft.ifft(c)
    kernels.mul_inplace(psi, phases)
    return sfft.fft(psi, overwrite_x=True)


def apply_kick(state: QuantumState, v: Potential, strength: float) -> QuantumState:
    """Multiply by ``exp(-i strength V(q))`` in the position representation."""
    if not math.isfinite(strength):
        raise ValueError("kick strength must be finite")
    c = _kick_fft_order(state.to_fft_order(), kick_phases(v, strength, state.basis_size))
    return state.with_amplitudes(np.fft.fftshift(c))


def apply_free(state: QuantumState, sign: int) -> QuantumState:
    """Free evolution ``c_n <- exp(-i sign (n+beta)^2 hbar/2) c_n``.

    ``sign=-1`` is the negative-kinetic-energy evolution.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ph = free_phases(state.n, state.beta, state.hbar_tilde, sign)
    return state.with_amplitudes(state.amplitudes * ph)


def apply_resonance_phase(state: QuantumState, resonance: ResonanceOrder = MAIN_RESONANCE) -> QuantumState:
    ph = resonance_phases(state.n, state.beta, resonance)
    return state.with_amplitudes(state.amplitudes * ph)


def momentum_expectation(state: QuantumState) -> float:
    """``sum |c_n|^2 (n + beta) hbar``."""
    return float(np.dot(state.probabilities, (state.n + state.beta) * state.hbar_tilde))


@dataclass(frozen=True)
class GuardReport:
    edge_population: float
    ok: bool


def _edge_width(basis_size: int) -> int:
    return max(1, math.ceil(EDGE_FRACTION / 2 * basis_size))


def _edge_population_fft(c: np.ndarray) -> float:
    n = c.shape[0]
    w = _edge_width(n)
    band = c[n // 2 - w: n // 2 + w]
    return float(np.sum(band.real**2 + band.imag**2))


def grid_guard(state: QuantumState) -> GuardReport:
    """Population in the outer 10% of the momentum index range."""
    pop = _edge_population_fft(state.to_fft_order())
    return GuardReport(pop, pop < EDGE_TOLERANCE)


# -- the period map ----------------------------------------------------------------

class RatchetPropagator:
    """Precomputed phase tables for one ``(params, beta, N)``; works in FFT order."""

    def __init__(self, params: ScaledParams, v_k: Potential | None = None,
                 v_l: Potential | None = None, basis_size: int = DEFAULT_BASIS,
                 beta: float = 0.0):
        self.params = params
        self.v_k = v_k if v_k is not None else cosine()
        self.v_l = v_l if v_l is not None else cosine()
        self.basis_size = _check_basis(basis_size)
        self.beta = float(beta)
        hb = params.hbar_tilde
        n = _fft_indices(self.basis_size)
        self.kick_k = kick_phases(self.v_k, params.k_tilde / hb, self.basis_size)
        self.kick_l = kick_phases(self.v_l.shifted(params.phi), params.l_tilde / hb, self.basis_size)
        self.free_fwd = free_phases(n, self.beta, hb, +1)
        self.free_back = free_phases(n, self.beta, hb, -1)
        if params.resonance != MAIN_RESONANCE or self.beta != 0.0:
            self.free_back = self.free_back * resonance_phases(n, self.beta, params.resonance)
        self.momentum = (n + self.beta) * hb

    def step(self, c: np.ndarray) -> tuple[np.ndarray, float]:
        """Advance FFT-ordered amplitudes one period; return (new c, <p>)."""
        psi = sfft.ifft(c, overwrite_x=True)
        kernels.mul_inplace(psi, self.kick_k)
        c = sfft.fft(psi, overwrite_x=True)
        kernels.mul_inplace(c, self.free_fwd)
        psi = sfft.ifft(c, overwrite_x=True)
        kernels.mul_inplace(psi, self.kick_l)
        c = sfft.fft(psi, overwrite_x=True)
        p = kernels.mul_moment(c, self.free_back, self.momentum)
        return c, p

    def expectation(self, c: np.ndarray) -> float:
        return float(np.dot(c.real**2 + c.imag**2, self.momentum))


def ratchet_step(state: QuantumState, params: ScaledParams, v_k: Potential | None = None,
                 v_l: Potential | None = None) -> QuantumState:
    """One kick period.  Raises :class:`TruncationError` if the result
    fails :func:`grid_guard`."""
    prop = RatchetPropagator(params, v_k, v_l, state.basis_size, state.beta)
    c, _ = prop.step(state.to_fft_order())
    pop = _edge_population_fft(c)
    if pop >= EDGE_TOLERANCE:
        raise TruncationError(f"edge population {pop:.3g} after one step at N={state.basis_size}",
                              basis_size=state.basis_size, edge_population=pop)
    return QuantumState(np.fft.fftshift(c), state.beta, params.hbar_tilde)


@dataclass
class Evolution:
    values: np.ndarray
    state: QuantumState
    basis_size: int
    norm_drift: float
    growths: list[tuple[int, int]] = field(default_factory=list)
    max_edge_population: float = 0.0


def evolve(params: ScaledParams, v_k: Potential | None = None, v_l: Potential | None = None,
           steps: int = 2000, *, n0: int = 0, beta: float = 0.0,
           basis_size: int = DEFAULT_BASIS, max_basis: int = MAX_BASIS,
           check_every: int = 100, auto_grow: bool = True,
           initial: QuantumState | None = None) -> Evolution:
    """Evolve ``|n0>`` (or ``initial``) and record ``<p>`` after every period.

    The edge band is checked every ``check_every`` periods and at the end.
    On failure the run restarts from the last passing checkpoint with twice
    the basis, up to ``max_basis``; beyond that :class:`TruncationError` is
    raised.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if check_every < 1:
        raise ValueError("check_every must be >= 1")
    if initial is None:
        state = make_initial_state(n0, basis_size, beta, params.hbar_tilde)
    else:
        state = QuantumState(initial.amplitudes.copy(), initial.beta, params.hbar_tilde)
    max_basis = _check_basis(max_basis)
    values = np.empty(steps + 1)
    growths: list[tuple[int, int]] = []
    max_edge = 0.0

    while True:
        pop = grid_guard(state).edge_population
        if pop < EDGE_TOLERANCE:
            break
        if not auto_grow or state.basis_size * 2 > max_basis:
            raise TruncationError(f"initial state touches the basis edge at N={state.basis_size}",
                                  time=0, basis_size=state.basis_size, edge_population=pop)
        state = state.grown()
        growths.append((0, state.basis_size))

    prop = RatchetPropagator(params, v_k, v_l, state.basis_size, state.beta)
    c = state.to_fft_order()
    values[0] = prop.expectation(c)
    norm0 = float(np.sum(c.real**2 + c.imag**2))
    ckpt_t, ckpt_c = 0, c.copy()
    t = 0
    while t < steps:
        c, values[t + 1] = prop.step(c)
        t += 1
        if t % check_every and t != steps:
            continue
        pop = _edge_population_fft(c)
        if pop < EDGE_TOLERANCE:
            max_edge = max(max_edge, pop)
            ckpt_t, ckpt_c = t, c.copy()
            continue
        n_now = c.shape[0]
        if not auto_grow or n_now * 2 > max_basis:
            raise TruncationError(
                f"edge population {pop:.3g} at t={t} with N={n_now} (max {max_basis})",
                time=t, basis_size=n_now, edge_population=pop)
        grown = QuantumState(np.fft.fftshift(ckpt_c), state.beta, params.hbar_tilde).grown()
        growths.append((ckpt_t, grown.basis_size))
        prop = RatchetPropagator(params, v_k, v_l, grown.basis_size, state.beta)
        c = grown.to_fft_order()
        ckpt_c = c.copy()
        t = ckpt_t

    final = QuantumState(np.fft.fftshift(c), state.beta, params.hbar_tilde)
    return Evolution(values=values, state=final, basis_size=final.basis_size,
                     norm_drift=abs(final.norm - norm0), growths=growths,
                     max_edge_population=max_edge)


def write_distribution_csv(state: QuantumState, path: str | Path) -> Path:
    """Write ``|c_n|^2`` with columns ``n, beta, prob``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "beta", "prob"])
        for n, pr in zip(state.n.tolist(), state.probabilities.tolist()):
            w.writerow([n, repr(state.beta), repr(pr)])
    return path
