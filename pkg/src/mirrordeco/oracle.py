"""Brute-force checks on a grid, independent of the closed-form propagator.

Wavefunctions are sampled on a periodic uniform grid and propagated with
Strang split-step Fourier steps.  Only the sampling constructor touches
:mod:`mirrordeco.gaussian`; propagation, overlaps and moments are computed
from the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm

from .errors import ConvergenceError, DomainError, InvalidInputError
from .gaussian import GaussianPacket, moments
from .model import ModelSpec, build_effective_model

SIGMAS = 12.0
EDGE_RATIO = 1e-6
MAX_SPEC_N = 12


@dataclass(frozen=True)
class GridState:
    samples: np.ndarray
    x_min: float
    x_max: float
    converged: bool = True

    @property
    def points(self) -> int:
        return self.samples.size

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.points)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dx)

    @property
    def edge_ratio(self) -> float:
        a = np.abs(self.samples)
        return float(max(a[0], a[-1]) / a.max())

    @property
    def valid(self) -> bool:
        """False when the packet has reached the grid edge (wrap-around)."""
        return self.edge_ratio < EDGE_RATIO

    def mean_pos(self) -> float:
        w = np.abs(self.samples) ** 2
        return float(np.sum(w * self.x) / np.sum(w))

    def var_pos(self) -> float:
        w = np.abs(self.samples) ** 2
        mu = np.sum(w * self.x) / np.sum(w)
        return float(np.sum(w * (self.x - mu) ** 2) / np.sum(w))

    def mean_mom(self, hbar: float = 1.0) -> float:
        k = 2.0 * np.pi * np.fft.fftfreq(self.points, self.dx)
        w = np.abs(np.fft.fft(self.samples)) ** 2
        return float(hbar * np.sum(w * k) / np.sum(w))


@dataclass
class EquivalenceReport:
    max_residual: float
    samples_tested: int
    forms_compared: tuple
    residuals: np.ndarray = field(repr=False)
    commutator_norms: dict = field(default_factory=dict)


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def grid_from_packet(pkt: GaussianPacket, x_min: float, x_max: float, points: int,
                     hbar: float = 1.0) -> GridState:
    """Sample ``pkt`` on ``points`` periodic nodes in ``[x_min, x_max)``.

    The window must reach 12 standard deviations either side of the mean,
    and the grid spacing must resolve 12 momentum deviations.
    """
    if not _is_pow2(points):
        raise InvalidInputError(f"points must be a power of two, got {points}")
    mo = moments(pkt, hbar)
    lo = mo.mean_pos - SIGMAS * mo.std_pos
    hi = mo.mean_pos + SIGMAS * mo.std_pos
    slack = 1e-9 * (hi - lo)
    if x_min > lo + slack or x_max < hi - slack:
        raise DomainError(f"window [{x_min}, {x_max}] narrower than 12 sigma",
                          suggestion=(lo, hi))
    kmax = (abs(mo.mean_mom) + SIGMAS * mo.std_mom) / hbar
    dx = (x_max - x_min) / points
    if math.pi / dx < kmax:
        need = 1 << math.ceil(math.log2((x_max - x_min) * kmax / math.pi))
        raise DomainError(f"{points} points cannot resolve momentum {kmax * hbar:.4g}",
                          suggestion=need)
    x = x_min + dx * np.arange(points)
    return GridState(np.asarray(pkt(x), dtype=complex), float(x_min), float(x_max))


def _strang(psi, x, k, mass, force, t, hbar, steps):
    dt = t / steps
    half_kick = np.exp(1j * force * x * dt / (2.0 * hbar))
    drift = np.exp(-1j * hbar * k * k * dt / (2.0 * mass))
    psi = psi * half_kick
    full_kick = half_kick * half_kick
    for i in range(steps):
        psi = np.fft.ifft(np.fft.fft(psi) * drift)
        psi = psi * (half_kick if i == steps - 1 else full_kick)
    return psi


def ray_distance(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    """L2 distance after removing the best global phase."""
    na = np.sum(np.abs(a) ** 2) * dx
    nb = np.sum(np.abs(b) ** 2) * dx
    ov = abs(np.sum(np.conj(a) * b) * dx)
    return math.sqrt(max(na + nb - 2.0 * ov, 0.0))


def grid_evolve(state: GridState, mass: float, force: float, t: float, hbar: float = 1.0,
                steps: int = 64, tol: float | None = None, max_steps: int = 1 << 14) -> GridState:
    """Split-step propagation under ``p^2/2m - force * x``.

    With ``tol`` set, the step count is doubled until two successive
    results agree to ``tol`` in ray distance (global phase ignored).
    """
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")
    if not mass > 0:
        raise InvalidInputError("mass must be positive")
    if t == 0:
        return state
    x = state.x
    k = 2.0 * np.pi * np.fft.fftfreq(state.points, state.dx)
    psi = _strang(state.samples, x, k, mass, force, t, hbar, steps)
    finer = None
    if tol is None:
        return replace(state, samples=psi)
    while True:
        steps *= 2
        if steps > max_steps:
            raise ConvergenceError(f"no convergence to {tol} within {max_steps} steps",
                                   coarse=psi, fine=finer)
        finer = _strang(state.samples, x, k, mass, force, t, hbar, steps)
        if ray_distance(psi, finer, state.dx) < tol:
            return replace(state, samples=finer, converged=True)
        psi = finer


def grid_overlap(s1: GridState, s2: GridState) -> complex:
    if (s1.points, s1.x_min, s1.x_max) != (s2.points, s2.x_min, s2.x_max):
        raise InvalidInputError("grid mismatch")
    return complex(np.sum(np.conj(s1.samples) * s2.samples) * s1.dx)


def window_for(width: float, mass: float, forces, t: float, hbar: float = 1.0):
    """Grid bounds and size holding a centred width-``width`` packet pushed by each force.

    Uses plain classical kinematics plus free spreading, not the packet algebra.
    """
    dp = hbar / (2.0 * width)
    spread = math.sqrt(width ** 2 + (dp * t / mass) ** 2)
    centres = [0.0] + [F * t * t / (2.0 * mass) for F in forces]
    lo = min(centres) - (SIGMAS + 2.0) * spread
    hi = max(centres) + (SIGMAS + 2.0) * spread
    kmax = (max(abs(F * t) for F in list(forces) + [0.0]) + (SIGMAS + 2.0) * dp) / hbar
    points = 1 << max(6, math.ceil(math.log2((hi - lo) * kmax / math.pi)))
    return lo, hi, points


def grid_factor(m: int, n: int, t: float, mass: float, force: float, width: float,
                hbar: float = 1.0, steps: int = 16, tol: float | None = 1e-9) -> tuple[complex, bool]:
    """Grid estimate of the single-mode factor ``<e_n|e_m>`` and a validity flag."""
    from .gaussian import standard_packet
    lo, hi, points = window_for(width, mass, [n * force, m * force], t, hbar)
    start = grid_from_packet(standard_packet(width), lo, hi, points, hbar)
    en = grid_evolve(start, mass, n * force, t, hbar, steps=steps, tol=tol)
    em = grid_evolve(start, mass, m * force, t, hbar, steps=steps, tol=tol)
    ok = en.valid and em.valid and en.converged and em.converged
    return grid_overlap(en, em), ok


def log_norm_width_dropped(n_minus_m: int, t: float, mass: float, force: float,
                           width: float) -> float:
    """Decay exponent with the width missing from the t^4 denominator.

    Deliberately wrong; the oracle uses it to show the grid rejects it.
    """
    return -(n_minus_m ** 2) * force ** 2 * (t ** 4 / (32.0 * mass ** 2)
                                             + width ** 2 * t ** 2 / 2.0)


# --- Hamiltonian equivalence -------------------------------------------------

def lab_hamiltonian(spec: ModelSpec, x, p, n):
    """Classical energy in laboratory coordinates."""
    m = np.asarray(spec.masses, dtype=float)
    g = np.asarray(spec.couplings, dtype=float)
    kinetic = np.sum(p ** 2 / (2.0 * m))
    return spec.omega0 * n + kinetic - n * np.dot(g, x), (
        abs(spec.omega0 * n) + kinetic + abs(n * np.dot(g, x)))


def normal_mode_hamiltonian(spec: ModelSpec, x, p, n, eff=None):
    """Classical energy after the centre-of-mass and normal-mode transformation."""
    eff = eff or build_effective_model(spec)
    m = np.asarray(spec.masses, dtype=float)
    M = m.sum()
    X = np.dot(m, x) / M
    P = p.sum()
    xi = x[:-1] - X
    # relative momenta from velocities: p_xi = tau @ d(xi)/dt
    v = p / m
    p_xi = eff.mass_matrix @ (v[:-1] - P / M)
    eta = eff.diagonalizer @ xi
    p_eta = eff.diagonalizer @ p_xi
    return (P * P / (2.0 * M) - eff.g_total * n * X
            + np.sum(p_eta ** 2 / (2.0 * eff.effective_masses) - eff.mode_forces * n * eta)
            + spec.omega0 * n)


def _commutator_norms(spec: ModelSpec, n_max: int = 3, grid: int = 16, env_grid: int = 8):
    """Frobenius norms of [H_s, V_sa] and [H_s, V_se] on a tiny truncated space.

    Pointer and up to two internal modes are put on small position grids
    with finite-difference kinetic terms.  A field-quadrature control
    ``[a + a^dag, V_sa]`` is reported to show the check is not vacuous.
    """
    eff = build_effective_model(spec)
    kept = min(2, eff.effective_masses.size)
    fock = n_max + 1
    num = sp.diags(np.arange(fock, dtype=float))
    lower = sp.diags(np.sqrt(np.arange(1, fock, dtype=float)), 1)
    quad = lower + lower.T

    def coord(points):
        return sp.diags(np.linspace(-1.0, 1.0, points))

    def kinetic(points, mass):
        h = 2.0 / (points - 1)
        lap = sp.diags([np.ones(points - 1), -2.0 * np.ones(points), np.ones(points - 1)],
                       [-1, 0, 1]) / (h * h)
        return -spec.hbar ** 2 * lap / (2.0 * mass)

    dims = [fock, grid] + [env_grid] * kept

    def embed(op, slot):
        mats = [sp.identity(d, format="csr") for d in dims]
        mats[slot] = op
        out = mats[0]
        for mat in mats[1:]:
            out = sp.kron(out, mat, format="csr")
        return out

    n_op = embed(num, 0)
    H_s = spec.omega0 * n_op
    V_sa = -eff.g_total * n_op @ embed(coord(grid), 1)
    V_se = sp.csr_matrix(H_s.shape)
    H_free = embed(kinetic(grid, eff.total_mass), 1)
    for j in range(kept):
        V_se = V_se - eff.mode_forces[j] * n_op @ embed(coord(env_grid), 2 + j)
        H_free = H_free + embed(kinetic(env_grid, eff.effective_masses[j]), 2 + j)

    def fro(a):
        return float(sparse_norm(a)) if a.nnz else 0.0

    def rel(a, b):
        denom = fro(a) * fro(b)
        return fro(a @ b - b @ a) / denom if denom else 0.0

    H = H_s + H_free + V_sa + V_se
    return {
        "H_s,V_sa": rel(H_s, V_sa),
        "H_s,V_se": rel(H_s, V_se),
        "H_s,H": rel(H_s, H),
        "control:quadrature,V_sa": rel(embed(quad, 0), V_sa),
    }


def hamiltonian_equivalence(spec: ModelSpec, samples: int = 100,
                            rng: np.random.Generator | None = None) -> EquivalenceReport:
    n_part = spec.n_particles
    if n_part > MAX_SPEC_N:
        raise InvalidInputError(
            f"N = {n_part} exceeds the desk-scale bound {MAX_SPEC_N}; refusing")
    rng = rng or np.random.default_rng(0)
    eff = build_effective_model(spec)
    res = np.empty(samples)
    for s in range(samples):
        x = rng.normal(size=n_part)
        p = rng.normal(size=n_part)
        n = int(rng.integers(0, 6))
        lab, scale = lab_hamiltonian(spec, x, p, n)
        res[s] = abs(lab - normal_mode_hamiltonian(spec, x, p, n, eff)) / scale
    return EquivalenceReport(
        max_residual=float(res.max()) if samples else 0.0,
        samples_tested=samples,
        forms_compared=("laboratory", "centre-of-mass + normal modes"),
        residuals=res,
        commutator_norms=_commutator_norms(spec),
    )
