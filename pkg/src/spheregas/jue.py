"""Jacobi-unitary-ensemble side of the duality.

The moment of the characteristic polynomial over the spherical ensemble
equals a JUE average, which turns the 2D partition-function ratio into a
1D gap probability.  At leading order that gap probability is governed by
the constrained equilibrium measure of the Jacobi log-gas (Wachter density
pushed left by a hard wall) and its rate function ``S(x, y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .energy import k_pre
from .geometry import ChargeConfig

__all__ = [
    "WachterSpec",
    "wachter",
    "charges_to_jacobi",
    "ConstrainedJUE",
    "constrained_density",
    "rate_function_S",
    "s_difference",
    "IdentityReport",
    "energy_identity_check",
    "SoftEdgeScale",
    "soft_edge_scale",
    "soft_edge_window",
    "log_selberg_j",
    "selberg_j",
    "jue_gap_quadrature",
]


@dataclass(frozen=True)
class WachterSpec:
    """Limiting spectral data of ``JUE_{n,(n gamma1, n gamma2)}``."""

    gamma1: float
    gamma2: float
    cJ: float
    dJ: float

    def density(self, x):
        """Wachter density on ``(cJ, dJ)``, zero elsewhere."""
        x = np.asarray(x, dtype=float)
        inside = (x > self.cJ) & (x < self.dJ)
        out = np.zeros_like(x)
        xs = x[inside]
        out[inside] = (
            (self.gamma1 + self.gamma2 + 2.0)
            * np.sqrt((xs - self.cJ) * (self.dJ - xs))
            / (2.0 * np.pi * xs * (1.0 - xs))
        )
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        return {"gamma1": self.gamma1, "gamma2": self.gamma2, "cJ": self.cJ, "dJ": self.dJ}


def wachter(gamma1: float, gamma2: float) -> WachterSpec:
    """Support edges ``cJ < dJ`` of the Wachter density.

    ``cJ, dJ = ((sqrt((g1+1)(g1+g2+1)) -/+ sqrt(g2+1)) / (g1+g2+2))^2``.
    """
    if gamma1 < 0 or gamma2 <= 0:
        raise ValueError("need gamma1 >= 0 and gamma2 > 0")
    den = (gamma1 + gamma2 + 2.0) ** 2
    root = math.sqrt((gamma1 + 1.0) * (gamma1 + gamma2 + 1.0))
    edge = math.sqrt(gamma2 + 1.0)
    return WachterSpec(
        gamma1=gamma1,
        gamma2=gamma2,
        cJ=(root - edge) ** 2 / den,
        dJ=(root + edge) ** 2 / den,
    )


def charges_to_jacobi(Q0: float, Q1: float) -> tuple[float, float]:
    """Charge fractions to Jacobi growth rates: ``gamma1 = (Q0-Q1)/Q1``, ``gamma2 = 1/Q1``."""
    return (Q0 - Q1) / Q1, 1.0 / Q1


@dataclass(frozen=True)
class ConstrainedJUE:
    """Equilibrium data of the Jacobi log-gas with a hard wall at ``zeta``.

    ``L`` is the left support edge; the wall itself is the right edge.
    ``B_c, C_c, Q_c, R_c, z0`` are the cascade of intermediates producing
    ``L`` from the resolvent cubic.
    """

    zeta: float
    B_c: float
    C_c: float
    Q_c: float
    R_c: float
    z0: float
    L: float
    spec: WachterSpec

    def density(self, x):
        """Constrained density on ``(L, zeta)``: square-root vanishing at ``L``,
        inverse-square-root wall divergence at ``zeta``."""
        g1, g2 = self.spec.gamma1, self.spec.gamma2
        x = np.asarray(x, dtype=float)
        inside = (x > self.L) & (x < self.zeta)
        out = np.zeros_like(x)
        xs = x[inside]
        lead = g1 * math.sqrt(self.zeta / self.L) / (2.0 + g1 + g2) if g1 > 0 else self._b_lim()
        out[inside] = (
            (g1 + g2 + 2.0)
            * np.sqrt((xs - self.L) / (self.zeta - xs))
            * (lead - xs)
            / (2.0 * np.pi * xs * (1.0 - xs))
        )
        return out if out.ndim else float(out)

    def _b_lim(self) -> float:
        # gamma1 = 0 pins L at the hard edge 0; the leading factor is then
        # fixed by normalisation alone: 1 - gamma2 sqrt(1-zeta)/(gamma2+2),
        # which reduces to dJ when the wall reaches the free edge
        return 1.0 - self.C_c

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta, "B_c": self.B_c, "C_c": self.C_c, "Q_c": self.Q_c,
            "R_c": self.R_c, "z0": self.z0, "L": self.L, "spec": self.spec.to_dict(),
        }


def constrained_density(spec: WachterSpec, zeta: float) -> ConstrainedJUE:
    """Hard-wall constrained JUE for ``0 < zeta <= dJ``.

    A wall above ``dJ`` does not touch the measure and is clamped to the
    unconstrained case.  ``z0`` comes from the principal complex cube roots
    of the resolvent cubic; their sum is real (asserted) also when the
    discriminant ``Q^3 + R^2`` is negative.
    """
    if zeta <= 0:
        raise ValueError("the wall must be positive")
    if zeta >= spec.dJ:
        zeta = spec.dJ
    g1, g2 = spec.gamma1, spec.gamma2
    if g1 == 0:
        # equal charges: the support is pinned to the hard edge at 0
        cj = ConstrainedJUE(zeta=zeta, B_c=0.0, C_c=g2 * math.sqrt(1 - zeta) / (2 + g2),
                            Q_c=0.0, R_c=0.0, z0=0.0, L=0.0, spec=spec)
        return cj
    B = g1 * math.sqrt(zeta) / (2.0 + g1 + g2)
    C = g2 * math.sqrt(1.0 - zeta) / (2.0 + g1 + g2)
    Q = -((1.0 - B**2 - C**2) ** 2) / 9.0
    R = (
        B**6
        - 3.0 * B**4 * (1.0 - C**2)
        + 3.0 * B**2 * (1.0 + 16.0 * C**2 + C**4)
        - (1.0 - C**2) ** 3
    ) / 27.0
    disc = Q**3 + R**2
    sq = complex(disc) ** 0.5
    cbrt = (R + sq) ** (1.0 / 3.0) + (R - sq) ** (1.0 / 3.0)
    if abs(cbrt.imag) > 1e-10 * (1.0 + abs(cbrt.real)):
        raise ArithmeticError(f"cube-root pair failed to produce a real z0: {cbrt}")
    z0 = -(2.0 * C**2 - B**2 - 2.0) / 3.0 + cbrt.real
    inner = B**2 - 2.0 * C**2 + 2.0 - z0 - 2.0 / math.sqrt(z0) * B * (C**2 + 1.0)
    L = 0.25 * (B + math.sqrt(z0) - math.sqrt(inner)) ** 2
    return ConstrainedJUE(zeta=zeta, B_c=B, C_c=C, Q_c=Q, R_c=R, z0=z0, L=L, spec=spec)


def rate_function_S(spec: WachterSpec, x: float, y: float) -> float:
    """Large-deviation functional ``S(x, y)`` of the constrained Jacobi gas.

    The confinement cost of pushing all eigenvalues below a wall is
    ``n^2 (S(L(zeta), zeta) - S(cJ, dJ))`` to leading order.
    """
    if not (0.0 < x < y < 1.0):
        raise ValueError(f"need 0 < x < y < 1, got x={x}, y={y}")
    g1, g2 = spec.gamma1, spec.gamma2
    sx, sy = math.sqrt(x), math.sqrt(y)
    cx, cy = math.sqrt(1.0 - x), math.sqrt(1.0 - y)
    return (
        -(g1 + g2 + 2.0) * (g1 * math.log((sx + sy) / 2.0) + g2 * math.log((cx + cy) / 2.0))
        + g1**2 / 4.0 * math.log(x * y)
        + g2**2 / 4.0 * math.log((1.0 - x) * (1.0 - y))
        + g1 * g2 * math.log((sx * cy + sy * cx) / 2.0)
        - math.log((y - x) / 4.0)
    )


def s_difference(spec: WachterSpec, zeta: float) -> float:
    """``S(L(zeta), zeta) - S(cJ, dJ)``: zero for ``zeta >= dJ``, positive below."""
    if zeta >= spec.dJ:
        return 0.0
    cj = constrained_density(spec, zeta)
    x = cj.L if cj.L > 0 else 1e-300
    if cj.L == 0.0:
        # gamma1 = 0: take the x -> 0 limit of S analytically (the g1 terms vanish)
        g2 = spec.gamma2
        s_con = (
            -(g2 + 2.0) * g2 * math.log((math.sqrt(1 - 0.0) + math.sqrt(1 - zeta)) / 2.0)
            + g2**2 / 4.0 * math.log(1.0 - zeta)
            - math.log(zeta / 4.0)
        )
        s_un = (
            -(g2 + 2.0) * g2 * math.log((math.sqrt(1 - spec.cJ) + math.sqrt(1 - spec.dJ)) / 2.0)
            + g2**2 / 4.0 * math.log((1.0 - spec.cJ) * (1.0 - spec.dJ))
            - math.log((spec.dJ - spec.cJ) / 4.0)
        )
        # cJ = 0 at gamma1 = 0, so the unconstrained g1-free form applies too
        return s_con - s_un
    return rate_function_S(spec, x, zeta) - rate_function_S(spec, spec.cJ, spec.dJ)


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of the 2D <-> 1D energy identity and their residual."""

    w: float
    lhs: float
    rhs: float
    rel_residual: float

    def to_dict(self) -> dict:
        return {"w": self.w, "lhs": self.lhs, "rhs": self.rhs, "rel_residual": self.rel_residual}


def energy_identity_check(cfg: ChargeConfig) -> IdentityReport:
    """Compare ``(2/Q1^2)(K^post - K^pre)`` with the JUE rate difference.

    The left side uses the sphere-gas energy constants
    ``K = -(1/(beta N^2)) log K_N`` assembled from the conformal-map closed
    forms; the right side is ``S(L(zeta), zeta) - S(cJ, dJ)`` at
    ``gamma1 = Q0/Q1 - 1``, ``gamma2 = 1/Q1``, ``zeta = 1/(1+w^2)``.  The
    two sides are independent closed-form chains.
    """
    br = k_pre(cfg)
    # stored constants are (4/(beta N^2)) log K, so K^post - K^pre = (pre - post)/4
    lhs = (br.K_pre - br.K_post) / (2.0 * cfg.Q1**2)
    g1, g2 = charges_to_jacobi(cfg.Q0, cfg.Q1)
    spec = wachter(g1, g2)
    rhs = s_difference(spec, 1.0 / (1.0 + cfg.w**2))
    denom = max(abs(lhs), abs(rhs), 1e-300)
    return IdentityReport(w=cfg.w, lhs=lhs, rhs=rhs, rel_residual=abs(lhs - rhs) / denom)


@dataclass(frozen=True)
class SoftEdgeScale:
    """Soft-edge scaling constants at the right Wachter edge."""

    c_frak: float
    ct_frak: float
    s_frak: float
    st_frak: float
    alpha_scale: float

    def to_dict(self) -> dict:
        return {
            "c_frak": self.c_frak, "ct_frak": self.ct_frak,
            "s_frak": self.s_frak, "st_frak": self.st_frak,
            "alpha_scale": self.alpha_scale,
        }


def soft_edge_scale(Q0: float, Q1: float) -> SoftEdgeScale:
    """Trigonometric parameters and the window scale ``alpha(Q0, Q1)``.

    ``c^2 = (g1+1)/(g1+g2+2)`` etc.;
    ``alpha = (c s ct st)^{-1} (c s ct st sqrt(g1+g2+2) / (ct st (c^2-s^2)
    + c s (ct^2 - st^2)))^{4/3}``, taken with the absolute value of the
    inner ratio so the window scale is positive for all charges.
    """
    if not Q0 >= Q1 > 0:
        raise ValueError("need Q0 >= Q1 > 0")
    g1, g2 = charges_to_jacobi(Q0, Q1)
    den = g1 + g2 + 2.0
    c = math.sqrt((g1 + 1.0) / den)
    ct = math.sqrt(1.0 / den)
    s = math.sqrt((g2 + 1.0) / den)
    st = math.sqrt((g1 + g2 + 1.0) / den)
    prod = c * s * ct * st
    ratio = prod * math.sqrt(den) / (ct * st * (c**2 - s**2) + c * s * (ct**2 - st**2))
    alpha = (1.0 / prod) * abs(ratio) ** (4.0 / 3.0)
    return SoftEdgeScale(c_frak=c, ct_frak=ct, s_frak=s, st_frak=st, alpha_scale=alpha)


def soft_edge_window(scale: SoftEdgeScale, spec: WachterSpec, s: float, N: float) -> float:
    """Wall position ``dJ + s / (alpha N^{2/3})`` inside the critical window."""
    return spec.dJ + s / (scale.alpha_scale * N ** (2.0 / 3.0))


# ---------------------------------------------------------------------------
# finite-n JUE integrals
# ---------------------------------------------------------------------------

def log_selberg_j(n: int, a: float, b: float) -> float:
    """``log J_{n,(a,b)}`` for the squared-Vandermonde Jacobi integral."""
    total = 0.0
    for j in range(n):
        total += (
            gammaln(a + 1.0 + j) + gammaln(b + 1.0 + j) + gammaln(j + 2.0)
            - gammaln(a + b + n + j + 1.0)
        )
    return total


def selberg_j(n: int, a: float, b: float) -> float:
    return math.exp(log_selberg_j(n, a, b))


def jue_gap_quadrature(r: int, a_exp: float, b_exp: float, s: float, n_nodes: int = 64) -> float:
    """Probability of no ``JUE_{r,(a,b)}`` eigenvalue in ``(s, 1)``.

    Direct ``r``-dimensional integration of the eigenvalue density over
    ``(0, s)^r`` with Gauss-Jacobi nodes carrying the ``t^a`` endpoint
    weight, normalised by the Selberg value.  Exact (up to roundoff) for
    integer ``b`` once the polynomial degree is resolved.
    """
    if not 1 <= r <= 3:
        raise ValueError("direct quadrature supported for r <= 3 only")
    if not (a_exp > -1 and b_exp > -1):
        raise ValueError("need Jacobi exponents > -1")
    if not 0.0 < s < 1.0:
        raise ValueError("wall must be inside (0, 1)")
    # Gauss-Jacobi on (-1,1) with weight (1-x)^0 (1+x)^a, mapped to (0,s)
    x, wts = roots_jacobi(n_nodes, 0.0, a_exp)
    t = 0.5 * s * (x + 1.0)
    wq = wts * (0.5 * s) ** (a_exp + 1.0)
    if r == 1:
        val = float(np.sum((1.0 - t) ** b_exp * wq))
    elif r == 2:
        t1, t2 = t[:, None], t[None, :]
        wgt = wq[:, None] * wq[None, :]
        val = float(np.sum(((1.0 - t1) * (1.0 - t2)) ** b_exp * (t2 - t1) ** 2 * wgt))
    else:
        t1 = t[:, None, None]
        t2 = t[None, :, None]
        t3 = t[None, None, :]
        wgt = wq[:, None, None] * wq[None, :, None] * wq[None, None, :]
        vdm = ((t2 - t1) * (t3 - t1) * (t3 - t2)) ** 2
        val = float(np.sum(((1.0 - t1) * (1.0 - t2) * (1.0 - t3)) ** b_exp * vdm * wgt))
    return val / selberg_j(r, a_exp, b_exp)
