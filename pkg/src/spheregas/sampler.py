"""Metropolis sampling of the beta = 2 sphere gas in stereographic coordinates.

The target density on C^N is

    prod_l |w - z_l|^(2 r) (1 + |z_l|^2)^(-(K + r + N + 1)) prod_{j<k} |z_j - z_k|^2

with r = Q1*N and K = Q0*N (real exponents are fine for sampling).  Moves
are single-particle Gaussian steps with the scale adapted during burn-in to
a 0.4 acceptance rate; the hot kernel is compiled (Cython) with a numpy
fallback selected at import.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .geometry import ChargeConfig

if os.environ.get("SPHEREGAS_PURE_PYTHON"):
    from . import _mcmc_fallback as _kernel

    BACKEND = "python"
else:
    try:
        from . import _mcmc as _kernel  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _mcmc_fallback as _kernel

        BACKEND = "python"

__all__ = ["BACKEND", "GasState", "MetropolisSampler", "metropolis_sample", "sphere_bins"]


@dataclass
class GasState:
    """One snapshot of the chain: plane coordinates plus bookkeeping."""

    particles: np.ndarray
    log_weight: float
    rng_seed: int
    sweep: int

    def to_rows(self) -> np.ndarray:
        return np.column_stack([self.particles.real, self.particles.imag])


def log_weight(z: np.ndarray, w: float, r_exp: float, pot_exp: float) -> float:
    """Full log target, recomputed from scratch (O(N^2))."""
    z = np.asarray(z, dtype=complex)
    val = 0.0
    if r_exp != 0.0:
        val += r_exp * float(np.sum(np.log(np.abs(w - z) ** 2)))
    val -= pot_exp * float(np.sum(np.log1p(np.abs(z) ** 2)))
    diff = np.abs(z[:, None] - z[None, :]) ** 2
    iu = np.triu_indices(len(z), k=1)
    val += float(np.sum(np.log(diff[iu])))
    return val


class MetropolisSampler:
    """Single-particle Metropolis chain for the projected sphere gas.

    Parameters
    ----------
    cfg : ChargeConfig or None
        Physical configuration; ``r = Q1*N``, ``K = Q0*N``.  Pass ``None``
        together with explicit ``r_exp``/``K_exp`` for bare exponents
        (``Q0 = Q1 = 0`` reproduces the plain spherical ensemble).
    N : int
        Number of mobile charges, at least 10.
    seed : int
        Seed of the underlying generator; chains with equal seeds produce
        identical snapshot streams.
    """

    RECOMPUTE_EVERY = 1000  # sweeps between full energy recomputations

    def __init__(self, cfg: ChargeConfig | None, N: int, seed: int = 0,
                 r_exp: float | None = None, K_exp: float | None = None):
        if N < 10:
            raise ValueError("need N >= 10")
        self.N = N
        if cfg is not None:
            self.w = cfg.w
            self.r_exp = cfg.Q1 * N
            self.K_exp = cfg.Q0 * N
        else:
            self.w = 0.0
            self.r_exp = float(r_exp or 0.0)
            self.K_exp = float(K_exp or 0.0)
        self.pot_exp = self.K_exp + self.r_exp + N + 1
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.step = 1.0 / math.sqrt(1.0 + self.K_exp + self.r_exp)
        # start from the uniform sphere measure
        u = self.rng.random(N)
        costh = 1.0 - 2.0 * u
        rad = np.tan(np.arccos(costh) / 2.0)
        phi = 2.0 * np.pi * self.rng.random(N)
        z = rad * np.exp(1j * phi)
        self.zx = np.ascontiguousarray(z.real)
        self.zy = np.ascontiguousarray(z.imag)
        self.sweeps_done = 0
        self.accepted = 0
        self.attempted = 0
        self._logw = log_weight(self.particles, self.w, self.r_exp, self.pot_exp)

    @property
    def particles(self) -> np.ndarray:
        return self.zx + 1j * self.zy

    @property
    def incremental_log_weight(self) -> float:
        return self._logw

    def recompute_log_weight(self) -> float:
        return log_weight(self.particles, self.w, self.r_exp, self.pot_exp)

    def run_sweeps(self, n_sweeps: int) -> float:
        """Run ``n_sweeps`` sweeps (``N`` attempted moves each); returns acceptance rate."""
        moves = n_sweeps * self.N
        acc_total = 0
        done = 0
        while done < moves:
            block = min(moves - done, 1 << 16)
            idx = self.rng.integers(0, self.N, size=block)
            gx = self.rng.standard_normal(block)
            gy = self.rng.standard_normal(block)
            logu = np.log(self.rng.random(block))
            acc, dlog = _kernel.run_moves(
                self.zx, self.zy, self.w, self.r_exp, self.pot_exp, self.step,
                idx, gx, gy, logu,
            )
            acc_total += acc
            self._logw += dlog
            done += block
        self.sweeps_done += n_sweeps
        self.accepted += acc_total
        self.attempted += moves
        if self.sweeps_done % self.RECOMPUTE_EVERY < n_sweeps:
            self._logw = self.recompute_log_weight()
        return acc_total / moves

    def tune(self, target: float = 0.4, batches: int = 40, sweeps_per_batch: int = 10) -> float:
        """Robbins-Monro adaptation of the proposal scale during burn-in."""
        for k in range(batches):
            rate = self.run_sweeps(sweeps_per_batch)
            gain = 1.0 / math.sqrt(1.0 + k)
            self.step *= math.exp(gain * (rate - target))
        return self.run_sweeps(sweeps_per_batch)

    def snapshot(self) -> GasState:
        return GasState(
            particles=self.particles.copy(),
            log_weight=self._logw,
            rng_seed=self.seed,
            sweep=self.sweeps_done,
        )


def metropolis_sample(cfg: ChargeConfig | None, N: int, sweeps: int, seed: int = 0,
                      burn_in: int | None = None, snapshot_every: int | None = None,
                      r_exp: float | None = None, K_exp: float | None = None):
    """Burn in, adapt the step, then collect decorrelated snapshots.

    Snapshots are separated by ``snapshot_every`` sweeps (default ``N``, so
    every particle moves ~``N`` times between snapshots).
    """
    if sweeps <= 0:
        raise ValueError("need a positive sweep budget")
    sampler = MetropolisSampler(cfg, N, seed=seed, r_exp=r_exp, K_exp=K_exp)
    if burn_in is None:
        burn_in = max(200, sweeps // 20)
    sampler.tune()
    burn_left = max(0, burn_in - sampler.sweeps_done)
    if burn_left:
        sampler.run_sweeps(burn_left)
    if snapshot_every is None:
        snapshot_every = N
    out = []
    remaining = sweeps
    while remaining > 0:
        chunk = min(snapshot_every, remaining)
        sampler.run_sweeps(chunk)
        remaining -= chunk
        out.append(sampler.snapshot())
    return out, sampler


def sphere_bins(z: np.ndarray, n_cos: int = 8, n_phi: int = 8):
    """Equal-area binning of plane points mapped back to the sphere.

    Returns the 2D histogram over (cos theta, phi) cells, each of equal
    spherical area; uniform sphere samples give equal expected counts.
    """
    z = np.asarray(z, dtype=complex)
    t = np.abs(z) ** 2
    costh = (1.0 - t) / (1.0 + t)
    phi = np.angle(z)
    H, _, _ = np.histogram2d(
        costh, phi, bins=[n_cos, n_phi], range=[[-1.0, 1.0], [-np.pi, np.pi]]
    )
    return H
