"""Simulator for the on-resonance double-kicked-rotor quantum ratchet accelerator."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .analysis import (BetaDistribution, CurrentSeries, RateEstimate, beta_averaged_series,
                       classical_series, estimate_rate, quantum_series, saturation_time)
from .classical import ClassicalEnsemble, classical_step, ensemble_evolve, make_ensemble, portrait
from .params import (ANTI_RESONANCE, MAIN_RESONANCE, ParameterError, PhysicalParams,
                     ResonanceOrder, ScaledParams, rescale)
from .potential import Potential, cosine, potential_deriv, potential_eval
from .quantum import (QuantumState, RatchetPropagator, TruncationError, apply_free, apply_kick,
                      apply_resonance_phase, evolve, grid_guard, make_initial_state,
                      momentum_expectation, ratchet_step)
from .sweep import Axis, RateGrid, ScanSpec, bucketize, run_scan

__all__ = [
    "ANTI_RESONANCE", "Axis", "BACKEND", "BetaDistribution", "ClassicalEnsemble", "CurrentSeries",
    "MAIN_RESONANCE", "ParameterError", "PhysicalParams", "Potential", "QuantumState",
    "RateEstimate", "RateGrid", "RatchetPropagator", "ResonanceOrder", "ScaledParams",
    "ScanSpec", "TruncationError", "apply_free", "apply_kick", "apply_resonance_phase",
    "beta_averaged_series", "bucketize", "classical_series", "classical_step", "cosine",
    "ensemble_evolve", "estimate_rate", "evolve", "grid_guard", "make_ensemble",
    "make_initial_state", "momentum_expectation", "portrait", "potential_deriv",
    "potential_eval", "quantum_series", "ratchet_step", "rescale", "run_scan",
    "saturation_time",
]
