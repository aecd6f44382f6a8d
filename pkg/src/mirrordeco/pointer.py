"""Pointer states, the cavity state and the system+pointer reduced density.

The pointer starts in a Gaussian of width ``sigma_x`` centred at ``X``
(a normalizable stand-in for a position eigenstate; sigma_x -> 0 recovers
it) and, given n photons, feels the constant force ``n G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .decoherence import factor_total
from .errors import InvalidInputError
from .gaussian import GaussianPacket, evolve_packet, log_overlap, overlap, standard_packet
from .model import ModeSet, PointerSpec


def evolve_pointer(n: int, t: float, pointer: PointerSpec, hbar: float = 1.0) -> GaussianPacket:
    start = standard_packet(pointer.width, x0=pointer.position)
    return evolve_packet(start, pointer.total_mass, n * pointer.coupling, t, hbar)


def pointer_overlap(m: int, n: int, t: float, pointer: PointerSpec,
                    hbar: float = 1.0) -> complex:
    """``<x_n(t)|x_m(t)>``."""
    if m == n or t == 0:
        return 1.0 + 0j
    return overlap(evolve_pointer(n, t, pointer, hbar), evolve_pointer(m, t, pointer, hbar))


def pointer_amplitude(x, n: int, t: float, pointer: PointerSpec, hbar: float = 1.0):
    """Coordinate wavefunction of the pointer, delta-normalized.

    The Gaussian start state is rescaled by ``(8 pi sigma^2)^(-1/4)`` so
    that it tends to ``delta(x - X)``; as sigma -> 0 the modulus at time t
    flattens to ``sqrt(M / (2 pi hbar t))``.
    """
    pkt = evolve_pointer(n, t, pointer, hbar)
    scale = (8.0 * math.pi * pointer.width ** 2) ** -0.25
    return scale * pkt(x)


@dataclass(frozen=True)
class CavityState:
    """Fock amplitudes of a pure cavity state, truncated at ``n_max``."""

    amplitudes: np.ndarray
    omega0: float = 1.0
    tol: float = 1e-10

    def __post_init__(self) -> None:
        c = np.asarray(self.amplitudes, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "amplitudes", c)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    def at(self, t: float) -> np.ndarray:
        """Amplitudes ``c_n exp(-i (n + 1/2) omega0 t)``."""
        n = np.arange(self.amplitudes.size)
        return self.amplitudes * np.exp(-1j * (n + 0.5) * self.omega0 * t)

    def weight(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def coherent_amplitudes(alpha: complex, tol: float = 1e-10,
                        omega0: float = 1.0) -> CavityState:
    """Coherent state ``c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)``.

    ``n_max`` is the smallest level whose neglected tail carries less
    probability than ``tol``.
    """
    if not 0 < tol < 1:
        raise InvalidInputError("tol must lie in (0, 1)")
    alpha = complex(alpha)
    mean = abs(alpha) ** 2
    n_max = 0
    while poisson.sf(n_max, mean) >= tol:
        n_max += 1
    n = np.arange(n_max + 1)
    if mean == 0:
        c = np.zeros(n_max + 1, dtype=complex)
        c[0] = 1.0
    else:
        logmag = -0.5 * mean + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        c = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    return CavityState(c, omega0, tol)


@dataclass(frozen=True)
class ReducedDensity:
    """System+pointer state kept in factored form.

    ``entries[n, m]`` is the weight of ``|n><m| (x) |x_n><x_m|``, i.e.
    ``c_n(t) c_m(t)^* conj(F_mn(t))``.  Both auxiliary matrices are indexed
    ``[m, n]``: ``env_factors[m, n] = F_mn = <e_n|e_m>`` and
    ``pointer_overlaps[m, n] = <x_n|x_m>``.
    """

    t: float
    entries: np.ndarray
    env_factors: np.ndarray
    env_log_mag: np.ndarray
    pointer_overlaps: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    @property
    def offdiag_norm(self) -> float:
        a = np.abs(self.entries)
        return float(a.sum() - np.trace(a))

    def rows(self):
        """(n, m, Re, Im, |F_mn|, |<x_n|x_m>|) for every entry."""
        size = self.entries.shape[0]
        for n in range(size):
            for m in range(size):
                w = self.entries[n, m]
                yield (n, m, w.real, w.imag, abs(self.env_factors[n, m]),
                       abs(self.pointer_overlaps[n, m]))


def reduced_density(cavity: CavityState, t: float, modes: ModeSet,
                    pointer: PointerSpec | None = None, hbar: float = 1.0) -> ReducedDensity:
    if abs(cavity.weight() - 1.0) > cavity.tol:
        raise InvalidInputError(
            f"cavity weight {cavity.weight():.12g} violates truncation tolerance {cavity.tol}")
    c = cavity.at(t)
    size = c.size
    F = np.eye(size, dtype=complex)
    logF = np.zeros((size, size))
    O = np.eye(size, dtype=complex)
    for n in range(size):
        for m in range(n + 1, size):
            rec = factor_total(m, n, t, modes, hbar)
            F[m, n] = rec.total
            F[n, m] = np.conj(rec.total)
            logF[m, n] = logF[n, m] = rec.log_mag
            if pointer is not None:
                o = pointer_overlap(m, n, t, pointer, hbar)
                O[m, n] = o
                O[n, m] = np.conj(o)
    entries = np.empty((size, size), dtype=complex)
    for n in range(size):
        entries[n, n] = abs(c[n]) ** 2
        for m in range(n + 1, size):
            w = c[n] * np.conj(c[m]) * np.conj(F[m, n])
            entries[n, m] = w
            entries[m, n] = np.conj(w)
    return ReducedDensity(t, entries, F, logF, O)


def pointer_gram(packets) -> np.ndarray:
    """Gram matrix ``<a_i|a_j>`` of a list of Gaussian pointer packets."""
    size = len(packets)
    G = np.eye(size, dtype=complex)
    for i in range(size):
        for j in range(i + 1, size):
            G[i, j] = np.exp(log_overlap(packets[i], packets[j]))
            G[j, i] = np.conj(G[i, j])
    return G


def schmidt_rebasis(amplitudes, s, gram=None):
    """Re-expand ``sum_n c_n |n>|a_n>`` over system states ``|s_n> = sum_k s_nk |k>``.

    Returns ``(p, T)``: ``p[n]`` is the squared norm of the pointer vector
    paired with ``|s_n>``, and row ``T[n]`` holds its normalized
    coefficients over ``|a_k>`` (zero when ``p[n] == 0``).  ``gram`` is the
    pointer Gram matrix; the default identity treats the ``|a_k>`` as
    orthonormal, which gives ``p_n = sum_k |(s^-1)_kn c_k|^2``.
    """
    c = np.asarray(amplitudes, dtype=complex)
    s = np.asarray(s, dtype=complex)
    if s.shape != (c.size, c.size):
        raise InvalidInputError("s must be square and match the amplitude count")
    if np.linalg.cond(s) > 1e12:
        raise InvalidInputError("s is singular on the truncated space")
    sinv = np.linalg.inv(s)
    gram = np.eye(c.size) if gram is None else np.asarray(gram, dtype=complex)
    # unnormalized pointer vector for |s_n>: v_n[k] = (s^-1)_kn c_k
    V = (sinv * c[:, None]).T
    p = np.real(np.einsum("nk,kl,nl->n", V.conj(), gram, V))
    p = np.clip(p, 0.0, None)
    T = np.zeros_like(V)
    nz = p > 1e-300
    T[nz] = V[nz] / np.sqrt(p[nz])[:, None]
    return p, T
