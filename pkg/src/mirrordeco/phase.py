"""Random-phase account of the same decoherence.

Given n photons rather than m, mode j acquires the phase operator
``(n - m) f_j t D_j / hbar`` with ``D_j = eta_j + t p_j / (2 m'_j)``.  For
the real Gaussian start state ``<eta p + p eta> = 0`` so

    (Delta D_j)^2 = a_j^2 + (t / 2m'_j)^2 (hbar / 2a_j)^2

and, because the state is Gaussian, ``|F_mn| = exp(-(Delta phi_mn)^2 / 2)``
holds exactly, with the mode phases adding in quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .decoherence import factor_total
from .errors import InvalidInputError
from .model import ModeSet


@dataclass(frozen=True)
class PhaseReport:
    per_mode_std: np.ndarray
    d_variances: np.ndarray
    multiplicity: int
    total_std: float
    min_mode_std: float
    sqrtN_bound: float

    @property
    def n_modes(self) -> int:
        return self.per_mode_std.size * self.multiplicity


def d_variance(t: float, mass, width, hbar: float = 1.0):
    """``(Delta D)^2`` for a mode of effective mass ``mass`` and width ``width``.

    Accepts scalars or arrays.
    """
    mass = np.asarray(mass, dtype=float)
    width = np.asarray(width, dtype=float)
    dp = hbar / (2.0 * width)
    out = (t / (2.0 * mass)) ** 2 * dp ** 2 + width ** 2
    return out if out.ndim else float(out)


def phase_std_mode(j: int, m: int, n: int, t: float, modes: ModeSet,
                   hbar: float = 1.0) -> float:
    if not 0 <= j < modes.masses.size:
        raise InvalidInputError(f"mode index {j} out of range")
    dv = d_variance(t, modes.masses[j], modes.widths[j], hbar)
    return abs(n - m) * abs(modes.forces[j]) * abs(t) * math.sqrt(dv) / hbar


def phase_std_total(m: int, n: int, t: float, modes: ModeSet,
                    hbar: float = 1.0) -> PhaseReport:
    dv = d_variance(t, modes.masses, modes.widths, hbar)
    stds = abs(n - m) * np.abs(modes.forces) * abs(t) * np.sqrt(dv) / hbar
    k = modes.multiplicity
    # scale before squaring so tiny or huge spreads neither underflow nor overflow
    smax = float(np.max(stds))
    total = smax * math.sqrt(k * kernels.tree_sum((stds / smax) ** 2)) if smax > 0 else 0.0
    smin = float(np.min(stds))
    return PhaseReport(stds, np.asarray(dv), k, total, smin,
                       math.sqrt(stds.size * k) * smin)


def gaussian_phase_relation(m: int, n: int, t: float, modes: ModeSet,
                            hbar: float = 1.0) -> tuple[float, float]:
    """``(|F_mn|, exp(-total_std^2 / 2))``, equal for Gaussian states."""
    lhs = factor_total(m, n, t, modes, hbar).magnitude
    rhs = math.exp(-0.5 * phase_std_total(m, n, t, modes, hbar).total_std ** 2)
    return lhs, rhs


def log_phase_relation(m: int, n: int, t: float, modes: ModeSet,
                       hbar: float = 1.0) -> tuple[float, float]:
    """Log form of :func:`gaussian_phase_relation`; usable past underflow."""
    lhs = factor_total(m, n, t, modes, hbar).log_mag
    rhs = -0.5 * phase_std_total(m, n, t, modes, hbar).total_std ** 2
    return lhs, rhs


def optimal_width(t: float, mass: float, hbar: float = 1.0) -> tuple[float, float]:
    """Width minimizing ``(Delta D)^2`` at fixed t: returns ``(a_opt^2, D_min)``.

    ``a^2 + (t hbar / 4m)^2 / a^2`` is smallest at ``a^2 = t hbar / 4m``,
    where it equals ``t hbar / 2m``.
    """
    if not (t > 0 and mass > 0):
        raise InvalidInputError("t and mass must be strictly positive")
    a2 = t * hbar / (4.0 * mass)
    return a2, math.sqrt(t * hbar / (2.0 * mass))


def amplification_threshold(mode_std: float) -> int:
    """Smallest number of identical modes whose total phase spread exceeds 2 pi."""
    if not mode_std > 0:
        raise InvalidInputError("mode_std must be positive")
    k = math.floor((2.0 * math.pi / mode_std) ** 2) + 1
    while k > 1 and math.sqrt(k - 1) * mode_std > 2.0 * math.pi:
        k -= 1
    return k
