# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Metropolis kernel: single-particle moves for the projected
sphere gas with weight prod |w-z|^(2r) (1+|z|^2)^(-pot_exp) prod |dz|^2."""

from libc.math cimport log

import numpy as np


def run_moves(double[::1] zx, double[::1] zy, double w, double r_exp, double pot_exp,
              double step, long[::1] idx, double[::1] gx, double[::1] gy,
              double[::1] logu):
    """Attempt len(idx) single-particle moves in place.

    Returns (accepted_count, accumulated_log_weight_change).
    """
    cdef Py_ssize_t nmoves = idx.shape[0]
    cdef Py_ssize_t N = zx.shape[0]
    cdef Py_ssize_t m, j, i
    cdef double ox, oy, nx, ny, dx, dy
    cdef double num, den, corr, delta, d2n, d2o
    cdef long acc = 0
    cdef double dlog = 0.0
    for m in range(nmoves):
        i = idx[m]
        ox = zx[i]; oy = zy[i]
        nx = ox + step * gx[m]; ny = oy + step * gy[m]
        num = 1.0; den = 1.0; corr = 0.0
        for j in range(N):
            if j == i:
                continue
            dx = zx[j] - nx; dy = zy[j] - ny
            d2n = dx * dx + dy * dy
            dx = zx[j] - ox; dy = zy[j] - oy
            d2o = dx * dx + dy * dy
            num *= d2n; den *= d2o
            if num > 1e120 or num < 1e-120 or den > 1e120 or den < 1e-120:
                corr += log(num) - log(den)
                num = 1.0; den = 1.0
        delta = corr + log(num) - log(den)
        if r_exp != 0.0:
            dx = w - nx
            d2n = dx * dx + ny * ny
            dx = w - ox
            d2o = dx * dx + oy * oy
            delta += r_exp * (log(d2n) - log(d2o))
        delta -= pot_exp * (log(1.0 + nx * nx + ny * ny) - log(1.0 + ox * ox + oy * oy))
        if logu[m] < delta:
            zx[i] = nx; zy[i] = ny
            acc += 1
            dlog += delta
    return acc, dlog
