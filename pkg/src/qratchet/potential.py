"""Periodic kick potentials as finite cosine series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .params import ParameterError

__all__ = ["Potential", "cosine", "scenario_one_k", "scenario_one_l"]


@dataclass(frozen=True)
class Potential:
    """``V(q) = sum_j a_j cos(m_j q + chi_j)`` with positive integer ``m_j``.

    Restricting to harmonics keeps ``V`` exactly ``2*pi``-periodic and gives
    a closed-form derivative for the classical map.
    """

    terms: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        clean = []
        for term in self.terms:
            if len(term) != 3:
                raise ParameterError("terms", f"expected (m, a, chi) triples, got {term!r}")
            m, a, chi = term
            if isinstance(m, float) and m.is_integer():
                m = int(m)
            if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
                raise ParameterError("terms", f"harmonic m must be a positive integer, got {m!r}")
            a, chi = float(a), float(chi)
            if not (math.isfinite(a) and math.isfinite(chi)):
                raise ParameterError("terms", "amplitude and phase must be finite")
            clean.append((int(m), a, chi))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> "Potential":
        return cls(tuple(tuple(t) for t in triples))

    def to_triples(self) -> list[list[float]]:
        return [[m, a, chi] for m, a, chi in self.terms]

    @property
    def harmonics(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms], dtype=np.float64)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([t[1] for t in self.terms], dtype=np.float64)

    @property
    def phases(self) -> np.ndarray:
        return np.array([t[2] for t in self.terms], dtype=np.float64)

    def shifted(self, phi: float) -> "Potential":
        """Return ``q -> V(q + phi)``."""
        if phi == 0.0:
            return self
        return Potential(tuple((m, a, chi + m * phi) for m, a, chi in self.terms))

    def __call__(self, q):
        return potential_eval(self, q)

    def deriv(self, q):
        return potential_deriv(self, q)


def potential_eval(v: Potential, q):
    q = np.asarray(q, dtype=np.float64)
    out = np.zeros_like(q)
    for m, a, chi in v.terms:
        out += a * np.cos(m * q + chi)
    return out if out.ndim else float(out)


def potential_deriv(v: Potential, q):
    """Closed-form ``dV/dq``."""
    q = np.asarray(q, dtype=np.float64)
    out = np.zeros_like(q)
    for m, a, chi in v.terms:
        out -= a * m * np.sin(m * q + chi)
    return out if out.ndim else float(out)


def cosine(phase: float = 0.0) -> Potential:
    """``cos(q + phase)``."""
    return Potential(((1, 1.0, phase),))


def scenario_one_k(phi1: float = 0.0, phi2: float = 0.0) -> Potential:
    """Bichromatic kick ``cos(q + phi1) + sin(2q + phi2)``."""
    return Potential(((1, 1.0, phi1), (2, 1.0, phi2 - math.pi / 2)))


def scenario_one_l() -> Potential:
    return cosine()
