"""Effective pointer + internal-environment model of a many-particle mirror.

The mirror is N free particles pushed by the cavity field with force
``g_i`` per photon.  Splitting off the centre of mass ``x`` (the pointer)
and the relative coordinates ``xi_j = x_j - x`` (j < N) leaves

    H = p_x^2 / 2M - G n x + sum_j [p_j^2 / 2m'_j - f_j n eta_j] + omega0 n

where ``eta = U xi`` are normal coordinates of the relative mass matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInputError

FloatArray = NDArray[np.float64]


def _as_masses(masses) -> FloatArray:
    m = np.asarray(masses, dtype=np.float64)
    if m.ndim != 1 or m.size < 2:
        raise InvalidInputError("need at least 2 masses (one relative coordinate)")
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise InvalidInputError("masses must be finite and strictly positive")
    return m


@dataclass(frozen=True)
class ModelSpec:
    """Laboratory description of the mirror and cavity.

    ``mode_widths`` optionally overrides the shared packet width per
    internal mode (length N-1).
    """

    masses: Sequence[float]
    couplings: Sequence[float]
    omega0: float = 1.0
    alpha: complex = 1.0
    packet_width: float = 1.0
    pointer_width: float = 1.0
    hbar: float = 1.0
    mode_widths: Optional[Sequence[float]] = None

    def __post_init__(self) -> None:
        m = _as_masses(self.masses)
        g = np.asarray(self.couplings, dtype=np.float64)
        if g.shape != m.shape:
            raise InvalidInputError(
                f"couplings length {g.size} != masses length {m.size}")
        if not np.all(np.isfinite(g)):
            raise InvalidInputError("couplings must be finite")
        for name in ("omega0", "packet_width", "pointer_width", "hbar"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be strictly positive, got {value}")
        if self.mode_widths is not None:
            w = np.asarray(self.mode_widths, dtype=np.float64)
            if w.shape != (m.size - 1,) or np.any(~(w > 0)):
                raise InvalidInputError(
                    f"mode_widths must be {m.size - 1} positive values")

    @property
    def n_particles(self) -> int:
        return len(self.masses)

    def widths(self) -> FloatArray:
        if self.mode_widths is not None:
            return np.asarray(self.mode_widths, dtype=np.float64)
        return np.full(self.n_particles - 1, float(self.packet_width))


@dataclass(frozen=True)
class ModeSet:
    """Independent internal modes: effective masses, per-photon forces, widths.

    Every listed mode is repeated ``multiplicity`` times, so a macroscopic
    ensemble of identical modes costs one entry.
    """

    masses: FloatArray
    forces: FloatArray
    widths: FloatArray
    multiplicity: int = 1

    def __post_init__(self) -> None:
        m = np.atleast_1d(np.asarray(self.masses, dtype=np.float64))
        f = np.atleast_1d(np.asarray(self.forces, dtype=np.float64))
        a = np.atleast_1d(np.asarray(self.widths, dtype=np.float64))
        if a.size == 1 and m.size > 1:
            a = np.full(m.size, a[0])
        if not (m.shape == f.shape == a.shape) or m.ndim != 1 or m.size == 0:
            raise InvalidInputError("masses, forces and widths must be equal-length 1-D")
        if np.any(~(m > 0)) or np.any(~(a > 0)) or not np.all(np.isfinite(f)):
            raise InvalidInputError("mode masses and widths must be positive, forces finite")
        if int(self.multiplicity) < 1:
            raise InvalidInputError("multiplicity must be >= 1")
        for arr in (m, f, a):
            arr.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "forces", f)
        object.__setattr__(self, "widths", a)
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @classmethod
    def identical(cls, mass: float, force: float, width: float, count: int = 1) -> "ModeSet":
        return cls(np.array([mass]), np.array([force]), np.array([width]), count)

    @property
    def n_modes(self) -> int:
        return self.masses.size * self.multiplicity

    def collapsed(self) -> "ModeSet":
        """Fold a list of identical entries into one entry with multiplicity."""
        if self.masses.size > 1 and all(
                np.all(arr == arr[0]) for arr in (self.masses, self.forces, self.widths)):
            return ModeSet(self.masses[:1], self.forces[:1], self.widths[:1],
                           self.multiplicity * self.masses.size)
        return self

    def with_widths(self, widths) -> "ModeSet":
        a = np.broadcast_to(np.asarray(widths, dtype=np.float64), self.masses.shape)
        return ModeSet(self.masses, self.forces, a.copy(), self.multiplicity)

    def with_multiplicity(self, multiplicity: int) -> "ModeSet":
        return ModeSet(self.masses, self.forces, self.widths, multiplicity)

    def scaled_forces(self, s: float) -> "ModeSet":
        return ModeSet(self.masses, self.forces * s, self.widths, self.multiplicity)


@dataclass(frozen=True)
class PointerSpec:
    """Centre-of-mass pointer: total mass, force per photon, initial width and position."""

    total_mass: float
    coupling: float
    width: float
    position: float = 0.0

    def __post_init__(self) -> None:
        if not (self.total_mass > 0 and self.width > 0):
            raise InvalidInputError("pointer mass and width must be strictly positive")


@dataclass(frozen=True)
class EffectiveModel:
    total_mass: float
    g_total: float
    relative_couplings: FloatArray
    mass_matrix: FloatArray
    diagonalizer: FloatArray
    effective_masses: FloatArray
    mode_forces: FloatArray
    spec: Optional[ModelSpec] = field(default=None, compare=False, repr=False)

    def modes(self, widths=None) -> ModeSet:
        if widths is None:
            widths = self.spec.widths() if self.spec is not None else 1.0
        a = np.broadcast_to(np.asarray(widths, dtype=np.float64),
                            self.effective_masses.shape).copy()
        return ModeSet(self.effective_masses, self.mode_forces, a)

    def pointer(self, width=None, position: float = 0.0) -> PointerSpec:
        if width is None:
            width = self.spec.pointer_width if self.spec is not None else 1.0
        return PointerSpec(self.total_mass, self.g_total, width, position)


def mass_matrix(masses) -> FloatArray:
    """Kinetic mass matrix of the N-1 relative coordinates.

    ``tau_ij = m_i delta_ij + m_i m_j / m_N``, obtained by eliminating
    ``x_N`` through the centre-of-mass constraint.
    """
    m = _as_masses(masses)
    inner = m[:-1]
    return np.diag(inner) + np.outer(inner, inner) / m[-1]


def effective_couplings(masses, couplings) -> tuple[float, FloatArray]:
    """Return ``(G, G_i)``: pointer coupling and relative-coordinate couplings.

    G is the sum over *all* N particles; substituting
    ``x_N = x - sum_{i<N} (m_i/m_N) xi_i`` into ``sum_i g_i x_i`` gives
    ``G x + sum_{i<N} (g_i - m_i g_N / m_N) xi_i``.
    """
    m = _as_masses(masses)
    g = np.asarray(couplings, dtype=np.float64)
    if g.shape != m.shape:
        raise InvalidInputError("couplings and masses must have equal length")
    rel = g[:-1] - (m[:-1] / m[-1]) * g[-1]
    return float(np.sum(g)), rel


def diagonalize_mass(tau) -> tuple[FloatArray, FloatArray]:
    """Orthogonal ``U`` with ``U tau U^T = diag(m')``, eigenvalues ascending.

    Each row of U is signed so its largest-magnitude entry is positive.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if tau.ndim != 2 or tau.shape[0] != tau.shape[1] or tau.size == 0:
        raise InvalidInputError("mass matrix must be square")
    scale = np.max(np.abs(tau))
    if not np.all(np.isfinite(tau)) or np.max(np.abs(tau - tau.T)) > 1e-12 * max(scale, 1e-300):
        raise InvalidInputError("mass matrix must be symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (tau + tau.T))
    if evals[0] <= 0:
        raise InvalidInputError("mass matrix must be positive definite")
    U = evecs.T.copy()
    lead = np.argmax(np.abs(U), axis=1)
    signs = np.sign(U[np.arange(U.shape[0]), lead])
    U *= signs[:, None]
    return U, evals


def build_effective_model(spec: ModelSpec) -> EffectiveModel:
    m = np.asarray(spec.masses, dtype=np.float64)
    tau = mass_matrix(m)
    G, rel = effective_couplings(m, spec.couplings)
    U, mprime = diagonalize_mass(tau)
    forces = U @ rel  # f_i = sum_j G_j (U^T)_ji
    for arr in (rel, tau, U, mprime, forces):
        arr.setflags(write=False)
    return EffectiveModel(
        total_mass=float(m.sum()),
        g_total=G,
        relative_couplings=rel,
        mass_matrix=tau,
        diagonalizer=U,
        effective_masses=mprime,
        mode_forces=forces,
        spec=spec,
    )
