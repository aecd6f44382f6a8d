# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-mode kernels; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport rint, M_PI

cnp.import_array()

DEF BLOCK = 4096


cdef inline double _wrap(double x) noexcept nogil:
    return x - 2.0 * M_PI * rint(x / (2.0 * M_PI))


cdef void _kernel(const double[::1] masses, const double[::1] forces,
                  const double[::1] widths, double n, double m, double t,
                  double hbar, double[::1] out_re, double[::1] out_im) noexcept nogil:
    # real arithmetic in the same order as _pykernels.log_factors
    cdef Py_ssize_t j
    cdef int k
    cdef double mass, q, w, di, dd, label, F, kick, b, lr, li, sq_re, sq_im, x, y
    cdef double ph_re, ph_im, qt, sr, si
    cdef double res[2][4]
    for j in range(masses.shape[0]):
        mass = masses[j]
        q = 1.0 / (4.0 * widths[j] * widths[j])
        w = hbar * t / (2.0 * mass)
        di = 4.0 * q * w
        dd = 1.0 + di * di
        for k in range(2):
            label = n if k == 0 else m
            F = label * forces[j]
            kick = F * t / hbar
            b = F * t * t / (2.0 * mass)
            ph_re = -(q * b * b)
            ph_im = -(F * F * t * t * t / (6.0 * mass * hbar)) + kick * b
            lr = -(2.0 * q * b)
            li = kick
            sq_re = lr * lr - li * li
            sq_im = 2.0 * lr * li
            x = -(w * sq_im)
            y = w * sq_re
            ph_re = ph_re + (x + y * di) / dd
            ph_im = ph_im + (y - x * di) / dd
            res[k][0] = (lr + li * di) / dd
            res[k][1] = (li - lr * di) / dd
            res[k][2] = ph_re
            res[k][3] = ph_im
        qt = q / dd
        sr = res[0][0] + res[1][0]
        si = res[1][1] - res[0][1]
        out_re[j] = (res[0][2] + res[1][2]) + (sr * sr - si * si) / (8.0 * qt)
        out_im[j] = _wrap((res[1][3] - res[0][3]) + (2.0 * sr * si) / (8.0 * qt))


def log_factors(masses, forces, widths, n, m, t, hbar=1.0):
    cdef const double[::1] mv = np.ascontiguousarray(masses, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(forces, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(widths, dtype=np.float64)
    cdef Py_ssize_t size = mv.shape[0]
    re = np.zeros(size)
    im = np.zeros(size)
    if t == 0 or n == m:
        return re, im
    cdef double[::1] rv = re
    cdef double[::1] iv = im
    cdef double dn = n, dm = m, dt = t, dh = hbar
    with nogil:
        _kernel(mv, fv, wv, dn, dm, dt, dh, rv, iv)
    return re, im


def wrap_phase(x):
    return x - 2.0 * np.pi * np.rint(x / (2.0 * np.pi))


def tree_sum(values):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t size = v.shape[0]
    cdef Py_ssize_t nb = (size + BLOCK - 1) // BLOCK
    cdef Py_ssize_t i, k, stop
    cdef double acc
    if nb == 0:
        return 0.0
    partial = np.zeros(nb)
    cdef double[::1] pv = partial
    with nogil:
        for k in range(nb):
            acc = 0.0
            stop = min((k + 1) * BLOCK, size)
            for i in range(k * BLOCK, stop):
                acc = acc + v[i]
            pv[k] = acc
    while partial.size > 1:
        if partial.size % 2:
            partial = np.append(partial, 0.0)
        partial = partial[0::2] + partial[1::2]
    return float(partial[0])
