"""Closed-form algebra of 1-D complex Gaussian wave packets.

A packet is ``psi(eta) = exp(-quad * eta**2 + lin * eta + phase)``.  Every
factor of the free-plus-linear-force propagator

    exp(-i (p^2/2m - F eta) t / hbar)
      = exp(-i t p^2 / 2m hbar) exp(i F t^2 p / 2m hbar) exp(i F t eta / hbar)
        * exp(-i F^2 t^3 / 6 m hbar)

maps (quad, lin, phase) to another triple, so evolution is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidInputError


@dataclass(frozen=True)
class GaussianPacket:
    quad: complex
    lin: complex = 0j
    phase: complex = 0j

    def __post_init__(self) -> None:
        q = complex(self.quad)
        if not (q.real > 0) or not cmath.isfinite(q):
            raise InvalidInputError(f"packet not normalizable: Re(quad) = {q.real}")
        object.__setattr__(self, "quad", q)
        object.__setattr__(self, "lin", complex(self.lin))
        object.__setattr__(self, "phase", complex(self.phase))

    def log_norm2(self) -> float:
        """ln of the integral of |psi|^2."""
        qr = self.quad.real
        return (2.0 * self.phase.real + self.lin.real ** 2 / (2.0 * qr)
                + 0.5 * math.log(math.pi / (2.0 * qr)))

    def norm2(self) -> float:
        return math.exp(self.log_norm2())

    def normalized(self) -> "GaussianPacket":
        return GaussianPacket(self.quad, self.lin, self.phase - 0.5 * self.log_norm2())

    def __call__(self, eta):
        """Evaluate psi on a scalar or numpy array of positions."""
        import numpy as np
        eta = np.asarray(eta)
        return np.exp(-self.quad * eta ** 2 + self.lin * eta + self.phase)


@dataclass(frozen=True)
class PacketMoments:
    mean_pos: float
    mean_mom: float
    std_pos: float
    std_mom: float
    cross: float


def standard_packet(width: float, x0: float = 0.0, p0: float = 0.0,
                    hbar: float = 1.0) -> GaussianPacket:
    """Normalized ``(2 pi a^2)^(-1/4) exp(-(eta - x0)^2 / 4a^2 + i p0 eta / hbar)``.

    With the defaults this is the real, symmetric packet of width ``a``
    used for every internal mode and (regularized) for the pointer.
    """
    if not (width > 0) or not math.isfinite(width):
        raise InvalidInputError(f"width must be positive, got {width}")
    quad = 1.0 / (4.0 * width * width)
    lin = complex(2.0 * quad * x0, p0 / hbar)
    phase = -quad * x0 * x0 - 0.25 * math.log(2.0 * math.pi * width * width)
    return GaussianPacket(quad, lin, phase)


def free_evolve(pkt: GaussianPacket, mass: float, t: float,
                hbar: float = 1.0) -> GaussianPacket:
    """Apply ``exp(-i t p^2 / 2m hbar)``.

    With ``s = i hbar t / 2m`` the update is ``quad -> quad/(1+4 quad s)``,
    ``lin -> lin/(1+4 quad s)`` and the phase picks up
    ``-log(1+4 quad s)/2 + lin^2 s/(1+4 quad s)``.  For Re(quad) > 0 the
    denominator never reaches the negative real axis, so the principal
    log is continuous in t.
    """
    if t == 0:
        return pkt
    s = 1j * hbar * t / (2.0 * mass)
    den = 1.0 + 4.0 * pkt.quad * s
    return GaussianPacket(
        pkt.quad / den,
        pkt.lin / den,
        pkt.phase - 0.5 * cmath.log(den) + pkt.lin * pkt.lin * s / den,
    )


def evolve_packet(pkt: GaussianPacket, mass: float, force: float, t: float,
                  hbar: float = 1.0) -> GaussianPacket:
    """Evolve under ``p^2/2m - force * eta`` for time ``t`` (t may be negative)."""
    if not (mass > 0):
        raise InvalidInputError(f"mass must be positive, got {mass}")
    if not (hbar > 0):
        raise InvalidInputError(f"hbar must be positive, got {hbar}")
    if t == 0:
        return pkt
    # psi(x, t) = exp(i F t x / hbar - i F^2 t^3 / 6 m hbar) psi_free(x - F t^2 / 2m, t).
    # Spreading first keeps the shift well conditioned for very narrow packets.
    free = free_evolve(pkt, mass, t, hbar)
    q, lin, ph = free.quad, free.lin, free.phase
    b = force * t * t / (2.0 * mass)
    ph = ph - q * b * b - lin * b
    lin = lin + 2.0 * q * b
    lin = lin + 1j * (force * t / hbar)
    ph = ph - 1j * force * force * t ** 3 / (6.0 * mass * hbar)
    return GaussianPacket(q, lin, ph)


def log_overlap(p1: GaussianPacket, p2: GaussianPacket) -> complex:
    """Complex log of <p1|p2>; stays finite where the overlap underflows."""
    s = p1.quad.conjugate() + p2.quad
    lin = p1.lin.conjugate() + p2.lin
    return (0.5 * cmath.log(math.pi / s) + lin * lin / (4.0 * s)
            + p1.phase.conjugate() + p2.phase)


def overlap(p1: GaussianPacket, p2: GaussianPacket) -> complex:
    return cmath.exp(log_overlap(p1, p2))


def moments(pkt: GaussianPacket, hbar: float = 1.0) -> PacketMoments:
    """Exact first and second moments of position and momentum."""
    q, lin = pkt.quad, pkt.lin
    var_x = 1.0 / (4.0 * q.real)
    mean_x = lin.real / (2.0 * q.real)
    # momentum density ~ exp(-2 Re(w) k^2 + 4 Im(lin w) k), w = 1/(4 quad)
    w = 1.0 / (4.0 * q)
    mean_k = (lin * w).imag / w.real
    var_k = 1.0 / (4.0 * w.real)
    cross = -2.0 * hbar * q.imag * var_x
    return PacketMoments(
        mean_pos=mean_x,
        mean_mom=hbar * mean_k,
        std_pos=math.sqrt(var_x),
        std_mom=hbar * math.sqrt(var_k),
        cross=cross,
    )
