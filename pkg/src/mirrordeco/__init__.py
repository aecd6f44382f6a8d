"""Closed-form decoherence of a cavity-driven many-particle mirror.

The mirror's centre of mass acts as the pointer and its relative
coordinates as an internal environment; the cavity photon number is the
measured observable.
"""

from .decoherence import (DecoherenceRecord, decoherence_time, factor_mode, factor_total,
                          gamma_longtime, norm_analytic)
from .errors import (ConfigError, ConvergenceError, DomainError, InvalidInputError,
                     NoDecoherenceError)
from .gaussian import GaussianPacket, evolve_packet, moments, overlap, standard_packet
from .kernels import BACKEND
from .model import (EffectiveModel, ModelSpec, ModeSet, PointerSpec, build_effective_model,
                    diagonalize_mass, effective_couplings, mass_matrix)
from .phase import (PhaseReport, d_variance, gaussian_phase_relation, optimal_width,
                    phase_std_mode, phase_std_total)
from .pointer import (CavityState, ReducedDensity, coherent_amplitudes, evolve_pointer,
                      pointer_overlap, reduced_density, schmidt_rebasis)

__version__ = "0.1.0"

__all__ = [
    "DecoherenceRecord",
    "decoherence_time",
    "factor_mode",
    "factor_total",
    "gamma_longtime",
    "norm_analytic",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "InvalidInputError",
    "NoDecoherenceError",
    "GaussianPacket",
    "evolve_packet",
    "moments",
    "overlap",
    "standard_packet",
    "BACKEND",
    "EffectiveModel",
    "ModelSpec",
    "ModeSet",
    "PointerSpec",
    "build_effective_model",
    "diagonalize_mass",
    "effective_couplings",
    "mass_matrix",
    "PhaseReport",
    "d_variance",
    "gaussian_phase_relation",
    "optimal_width",
    "phase_std_mode",
    "phase_std_total",
    "CavityState",
    "ReducedDensity",
    "coherent_amplitudes",
    "evolve_pointer",
    "pointer_overlap",
    "reduced_density",
    "schmidt_rebasis",
]
