"""Pure-numpy Metropolis kernel, API-compatible with the compiled one.

Roughly two orders of magnitude slower than the Cython extension; selected
automatically when the extension is not built.
"""

import numpy as np


def run_moves(zx, zy, w, r_exp, pot_exp, step, idx, gx, gy, logu):
    """Attempt ``len(idx)`` single-particle moves in place; see ``_mcmc.run_moves``."""
    N = zx.shape[0]
    acc = 0
    dlog = 0.0
    for m in range(idx.shape[0]):
        i = idx[m]
        ox, oy = zx[i], zy[i]
        nx, ny = ox + step * gx[m], oy + step * gy[m]
        d2n = (zx - nx) ** 2 + (zy - ny) ** 2
        d2o = (zx - ox) ** 2 + (zy - oy) ** 2
        d2n[i] = 1.0
        d2o[i] = 1.0
        if np.any(d2n == 0.0):
            continue
        delta = float(np.log(d2n).sum() - np.log(d2o).sum())
        if r_exp != 0.0:
            delta += r_exp * (np.log((w - nx) ** 2 + ny**2) - np.log((w - ox) ** 2 + oy**2))
        delta -= pot_exp * (np.log1p(nx * nx + ny * ny) - np.log1p(ox * ox + oy * oy))
        if logu[m] < delta:
            zx[i] = nx
            zy[i] = ny
            acc += 1
            dlog += delta
    return acc, dlog
