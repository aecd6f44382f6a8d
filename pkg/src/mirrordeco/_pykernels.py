"""Pure numpy implementation of the per-mode kernels.

Mirrors ``_ckernels.pyx`` operation for operation; used when the compiled
extension is absent or ``MIRRORDECO_BACKEND=python`` is set.
"""

import numpy as np

BLOCK = 4096


def log_factors(masses, forces, widths, n, m, t, hbar=1.0):
    """Per-mode ``log <e_n|e_m>`` as (real part, phase in [-pi, pi]).

    Both conditional packets share the same quadratic coefficient, so the
    normalization terms cancel exactly and are dropped; only the
    force-dependent pieces are accumulated.  The arithmetic is spelled out
    in real operations in the same order as the compiled kernel, so the two
    backends agree bit for bit.
    """
    masses = np.ascontiguousarray(masses, dtype=np.float64)
    forces = np.ascontiguousarray(forces, dtype=np.float64)
    widths = np.ascontiguousarray(widths, dtype=np.float64)
    if t == 0 or n == m:
        z = np.zeros(masses.shape)
        return z, z.copy()
    q = 1.0 / (4.0 * widths * widths)
    w = hbar * t / (2.0 * masses)          # free step: s = i w
    di = 4.0 * q * w                       # den = 1 + i di
    dd = 1.0 + di * di
    out = []
    for label in (float(n), float(m)):
        F = label * forces
        kick = F * t / hbar
        b = F * t * t / (2.0 * masses)
        # boost, then shift by -b
        ph_re = -(q * b * b)
        ph_im = -(F * F * t * t * t / (6.0 * masses * hbar)) + kick * b
        lr = -(2.0 * q * b)
        li = kick
        # free step: ph += lin^2 s / den, lin /= den
        sq_re = lr * lr - li * li
        sq_im = 2.0 * lr * li
        x = -(w * sq_im)
        y = w * sq_re
        ph_re = ph_re + (x + y * di) / dd
        ph_im = ph_im + (y - x * di) / dd
        out.append(((lr + li * di) / dd, (li - lr * di) / dd, ph_re, ph_im))
    (ar, ai, c1r, c1i), (br, bi, c2r, c2i) = out
    qt = q / dd                             # Re(q / den)
    sr = ar + br                            # conj(lin_n) + lin_m
    si = bi - ai
    logf_re = (c1r + c2r) + (sr * sr - si * si) / (8.0 * qt)
    logf_im = (c2i - c1i) + (2.0 * sr * si) / (8.0 * qt)
    return logf_re, wrap_phase(logf_im)


def wrap_phase(x):
    """Map angles to [-pi, pi] (ties round half to even, like C ``rint``)."""
    return x - 2.0 * np.pi * np.rint(x / (2.0 * np.pi))


def tree_sum(values):
    """Deterministic sum: sequential within fixed blocks, pairwise across blocks.

    The order depends only on the array length, never on threading.
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    nb = -(-v.size // BLOCK)
    if nb == 0:
        return 0.0
    padded = np.zeros(nb * BLOCK)
    padded[: v.size] = v
    # cumsum accumulates strictly left to right
    partial = np.cumsum(padded.reshape(nb, BLOCK), axis=1)[:, -1]
    while partial.size > 1:
        if partial.size % 2:
            partial = np.append(partial, 0.0)
        partial = partial[0::2] + partial[1::2]
    return float(partial[0])
