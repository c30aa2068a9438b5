"""Raw and rescaled control parameters of the on-resonance double-kicked rotor.

The raw model is a rotor kicked twice per period ``T``: a ``K`` kick at the
start and an ``L`` kick after a delay ``eta``.  On a quantum resonance
``T * hbar = 4*pi*nu/mu`` every quantity of interest depends only on the
rescaled knobs ``k_tilde = eta*K``, ``l_tilde = eta*L`` and
``hbar_tilde = eta*hbar``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace

__all__ = [
    "ParameterError",
    "PhysicalParams",
    "ResonanceOrder",
    "ScaledParams",
    "MAIN_RESONANCE",
    "ANTI_RESONANCE",
    "K_RANGE",
    "HBAR_RANGE",
    "rescale",
    "infer_resonance",
    "wrap_angle",
]

K_RANGE = (0.0, 100.0)
HBAR_RANGE = (0.01, 20.0)
RESONANCE_RTOL = 1e-12


class ParameterError(ValueError):
    """Invalid parameter value; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def wrap_angle(x):
    """Reduce angles to ``[-pi, pi)``.  Only used for output."""
    return (x + math.pi) % (2 * math.pi) - math.pi


@dataclass(frozen=True)
class ResonanceOrder:
    """Resonance ``T*hbar = 4*pi*nu/mu`` with coprime ``nu``, ``mu``."""

    nu: int = 1
    mu: int = 1

    def __post_init__(self):
        for key in ("nu", "mu"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ParameterError(key, f"must be a positive integer, got {v!r}")
        if math.gcd(self.nu, self.mu) != 1:
            raise ParameterError("mu", f"nu={self.nu} and mu={self.mu} must be coprime")

    @property
    def ratio(self) -> float:
        return self.nu / self.mu

    @property
    def t_hbar(self) -> float:
        """The product ``T*hbar`` this resonance fixes."""
        return 4 * math.pi * self.nu / self.mu


MAIN_RESONANCE = ResonanceOrder(1, 1)
ANTI_RESONANCE = ResonanceOrder(1, 2)


@dataclass(frozen=True)
class PhysicalParams:
    T: float
    eta: float
    K: float
    L: float
    hbar: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError("T", "must be > 0")
        if not 0 < self.eta < self.T:
            raise ParameterError("eta", f"must satisfy 0 < eta < T={self.T}")
        if not self.hbar > 0:
            raise ParameterError("hbar", "must be > 0")
        if not self.K >= 0:
            raise ParameterError("K", "must be >= 0")
        if not self.L >= 0:
            raise ParameterError("L", "must be >= 0")


@dataclass(frozen=True)
class ScaledParams:
    """Rescaled knobs plus the kick phase shift and resonance order.

    ``phi`` is kept unreduced; it shifts the second kick potential,
    ``V_L(q) -> V_L(q + phi)``.
    """

    k_tilde: float
    l_tilde: float
    hbar_tilde: float
    phi: float = math.pi / 2
    resonance: ResonanceOrder = field(default=MAIN_RESONANCE)

    def __post_init__(self):
        for key in ("k_tilde", "l_tilde"):
            v = getattr(self, key)
            if not (K_RANGE[0] <= v <= K_RANGE[1]):
                raise ParameterError(key, f"{v!r} outside valid range [{K_RANGE[0]}, {K_RANGE[1]}]")
        if not (HBAR_RANGE[0] <= self.hbar_tilde <= HBAR_RANGE[1]):
            raise ParameterError(
                "hbar_tilde",
                f"{self.hbar_tilde!r} outside valid range [{HBAR_RANGE[0]}, {HBAR_RANGE[1]}]",
            )
        if not math.isfinite(self.phi):
            raise ParameterError("phi", "must be finite")
        if not isinstance(self.resonance, ResonanceOrder):
            raise ParameterError("resonance", "must be a ResonanceOrder")

    def replace(self, **changes) -> "ScaledParams":
        return replace(self, **changes)


def infer_resonance(t_hbar: float, max_mu: int = 64) -> ResonanceOrder:
    """Best rational ``nu/mu`` for ``t_hbar / (4*pi)``; not checked here."""
    frac = Fraction(t_hbar / (4 * math.pi)).limit_denominator(max_mu)
    if frac <= 0:
        raise ParameterError("T", f"T*hbar={t_hbar!r} is not a resonance")
    return ResonanceOrder(frac.numerator, frac.denominator)


def rescale(p: PhysicalParams, resonance: ResonanceOrder | None = None) -> ScaledParams:
    """Map raw parameters to the rescaled set, checking the resonance.

    With ``resonance=None`` the order is read off ``T*hbar`` (denominators up
    to 64).  Raises :class:`ParameterError` when ``T*hbar`` is not
    ``4*pi*nu/mu`` to relative precision 1e-12: off-resonance dynamics is not
    modelled.
    """
    if resonance is None:
        resonance = infer_resonance(p.T * p.hbar)
    target = resonance.t_hbar
    if abs(p.T * p.hbar - target) > RESONANCE_RTOL * target:
        raise ParameterError(
            "T",
            f"T*hbar={p.T * p.hbar!r} is off the declared resonance 4*pi*{resonance.nu}/{resonance.mu}",
        )
    return ScaledParams(
        k_tilde=p.eta * p.K,
        l_tilde=p.eta * p.L,
        hbar_tilde=p.eta * p.hbar,
        phi=p.phi,
        resonance=resonance,
    )
