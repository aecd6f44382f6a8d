"""Decoherence factors of the internal environment.

For cavity Fock labels (m, n) the environment factor is the product over
internal modes of ``<e_n^j | e_m^j>``, where ``e_n^j`` is the mode's
initial packet evolved under force ``n f_j``.  Its magnitude is

    |F_mn(t)| = exp[-(n-m)^2 sum_j f_j^2 (t^4 / (32 m'_j^2 a_j^2)
                                           + a_j^2 t^2 / (2 hbar^2))]

and decays as ``exp(-(n-m)^2 Gamma t^4)`` at long times.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidInputError, NoDecoherenceError
from .gaussian import evolve_packet, log_overlap, standard_packet
from .model import ModeSet

# Modes per work unit when factor_total runs threaded; fixed so the
# reduction order never depends on the worker count.
CHUNK = 1 << 18


@dataclass(frozen=True)
class DecoherenceRecord:
    """Total factor with its per-mode breakdown.

    ``per_mode_log`` holds the complex log of each *listed* mode's factor;
    with ``multiplicity > 1`` every entry stands for that many modes.
    """

    m: int
    n: int
    t: float
    per_mode_log: np.ndarray
    multiplicity: int
    log_mag: float
    phase: float

    @property
    def per_mode(self) -> np.ndarray:
        return np.exp(self.per_mode_log)

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_mag)

    @property
    def total(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class DecoherenceTime:
    long_time: float
    exact: float


def _check_labels(m, n):
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise InvalidInputError(f"Fock labels must be non-negative integers, got ({m}, {n})")


def factor_mode(j: int, m: int, n: int, t: float, modes: ModeSet,
                hbar: float = 1.0) -> complex:
    """``<e_n^j|e_m^j>`` for listed mode ``j`` via explicit packet evolution."""
    _check_labels(m, n)
    if not 0 <= j < modes.masses.size:
        raise InvalidInputError(f"mode index {j} out of range 0..{modes.masses.size - 1}")
    if m == n or t == 0:
        return 1.0 + 0j
    mass, f, a = modes.masses[j], modes.forces[j], modes.widths[j]
    start = standard_packet(a)
    en = evolve_packet(start, mass, n * f, t, hbar)
    em = evolve_packet(start, mass, m * f, t, hbar)
    return complex(np.exp(log_overlap(en, em)))


def factor_total(m: int, n: int, t: float, modes: ModeSet, hbar: float = 1.0,
                 threads: int = 1) -> DecoherenceRecord:
    """Product of all per-mode factors, accumulated in log space.

    Identical listed modes are collapsed first, so a uniform ensemble of
    10^7 modes costs one kernel evaluation.
    """
    _check_labels(m, n)
    modes = modes.collapsed()
    size = modes.masses.size
    if m == n or t == 0:
        logs = np.zeros(size, dtype=complex)
        return DecoherenceRecord(m, n, t, logs, modes.multiplicity, 0.0, 0.0)

    def run(lo, hi):
        return kernels.log_factors(modes.masses[lo:hi], modes.forces[lo:hi],
                                   modes.widths[lo:hi], n, m, t, hbar)

    bounds = [(lo, min(lo + CHUNK, size)) for lo in range(0, size, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda b: run(*b), bounds))
    else:
        parts = [run(*b) for b in bounds]
    re = np.concatenate([p[0] for p in parts])
    im = np.concatenate([p[1] for p in parts])

    k = modes.multiplicity
    log_mag = k * kernels.tree_sum(re)
    phase = math.remainder(k * kernels.tree_sum(im), 2.0 * math.pi)
    return DecoherenceRecord(m, n, t, re + 1j * im, k, log_mag, phase)


def _quartic_and_quadratic(modes: ModeSet, hbar: float) -> tuple[float, float]:
    """Coefficients (A, B) of -ln|F| = (n-m)^2 (A t^4 + B t^2)."""
    f2 = modes.forces ** 2
    a2 = modes.widths ** 2
    k = modes.multiplicity
    quart = k * kernels.tree_sum(f2 / (32.0 * modes.masses ** 2 * a2))
    quad = k * kernels.tree_sum(f2 * a2) / (2.0 * hbar * hbar)
    return quart, quad


def log_norm_analytic(m: int, n: int, t: float, modes: ModeSet,
                      hbar: float = 1.0) -> float:
    quart, quad = _quartic_and_quadratic(modes, hbar)
    return -float((n - m) ** 2) * (quart * t ** 4 + quad * t * t)


def norm_analytic(m: int, n: int, t: float, modes: ModeSet, hbar: float = 1.0) -> float:
    """|F_mn(t)| from the closed-form Gaussian law (width squared in the t^4 term)."""
    return math.exp(log_norm_analytic(m, n, t, modes, hbar))


def gamma_longtime(modes: ModeSet, hbar: float = 1.0) -> float:
    """Long-time rate ``Gamma = sum_j f_j^2 / (32 m'_j^2 a_j^2)`` (hbar-free)."""
    return _quartic_and_quadratic(modes, hbar)[0]


def decoherence_time(m: int, n: int, modes: ModeSet, hbar: float = 1.0) -> DecoherenceTime:
    """Time at which |F_mn| reaches 1/e.

    ``long_time`` solves the t^4 law, giving ``((m-n)^2 Gamma)^(-1/4)``;
    ``exact`` solves the full quartic ``A u^2 + B u = 1/(m-n)^2`` with u = t^2.
    """
    _check_labels(m, n)
    if m == n:
        raise NoDecoherenceError("m == n: factor is identically 1")
    quart, quad = _quartic_and_quadratic(modes, hbar)
    if quart <= 0:
        raise NoDecoherenceError("Gamma = 0: no forces act on the environment")
    d2 = float((n - m) ** 2)
    long_time = (d2 * quart) ** -0.25
    c = 1.0 / d2
    # stable root of quart u^2 + quad u - c = 0
    u = 2.0 * c / (quad + math.sqrt(quad * quad + 4.0 * quart * c))
    return DecoherenceTime(long_time, math.sqrt(u))
