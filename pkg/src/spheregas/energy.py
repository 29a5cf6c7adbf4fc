"""Closed-form electrostatic energies of the two-charge sphere gas.

All constants are stored in the N- and beta-free normalisation
``(4/(beta N^2)) log K``, written ``log_k`` below.  The energy constant
plotted on phase diagrams (monotone decreasing in ``w`` pre-critically) is
``-log_k/4``; the duality identity uses the same convention, see
:func:`spheregas.jue.energy_identity_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conformal import ConformalMap, build_map
from .geometry import ChargeConfig, PhaseTag, classify_phase, w_to_ws

__all__ = [
    "EnergyBreakdown",
    "k_post",
    "integral_log_density",
    "w_potential",
    "variational_constant",
    "k_pre",
    "k_pre_critical_limit",
    "k_pre_large_w",
    "energy_constant",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """Droplet integrals and energy constants for one configuration.

    ``K_pre``/``K_post`` hold ``(4/(beta N^2)) log K^{pre/post}``; at the
    phase boundary the two coincide.  ``C_const`` is the constant value of
    the equilibrium variational identity on the droplet.
    """

    I_log: float
    W_zeta1: float
    W_w: float
    C_const: float
    K_pre: float
    K_post: float

    def to_dict(self) -> dict:
        return {
            "I_log": self.I_log, "W_zeta1": self.W_zeta1, "W_w": self.W_w,
            "C_const": self.C_const, "K_pre": self.K_pre, "K_post": self.K_post,
        }


def k_post(Q0: float, Q1: float) -> float:
    """Post-critical constant ``(4/(beta N^2)) log K^post``; symmetric in the charges.

    Equals the electrostatic energy balance of the sphere with both caps
    removed, and is independent of ``w`` throughout the post-critical phase.
    """
    if Q0 <= 0 or Q1 <= 0:
        raise ValueError("charges must be positive")
    Q0, Q1 = max(Q0, Q1), min(Q0, Q1)  # bitwise symmetric evaluation
    S = 1.0 + Q0 + Q1
    return (
        S
        + 2.0 * S * math.log(S)
        + Q0**2 * math.log(Q0)
        + Q1**2 * math.log(Q1)
        - (1.0 + Q0) ** 2 * math.log(1.0 + Q0)
        - (1.0 + Q1) ** 2 * math.log(1.0 + Q1)
    )


def _log_arg(x: float, what: str) -> float:
    # every logarithm in the closed forms must see a positive argument
    # under the orderings 0 < a < v0 < b, v1 > 1, 0 < u_Z <= 1
    if x <= 0:
        raise ArithmeticError(f"non-positive log argument in {what}: {x}")
    return math.log(x)


def _t_ratio(m: ConformalMap) -> float:
    """The recurring combination ``w^2 zeta'(1/v0) / (v0^2 zeta'(v0))``."""
    zp_v0 = complex(m.zeta_prime(m.v0)).real
    zp_inv = complex(m.zeta_prime(1.0 / m.v0)).real
    return m.w**2 * zp_inv / (m.v0**2 * zp_v0)


def integral_log_density(m: ConformalMap) -> float:
    """Closed form of ``int log(1+|z|^2) mu(z) d^2 z`` over the droplet."""
    Q0, Q1 = m.Q0, m.Q1
    S = m.total
    T = _t_ratio(m)
    return (
        1.0
        - Q0 * _log_arg(1.0 + (1.0 + Q1) / Q0, "I_log")
        + T * Q1 * _log_arg((1.0 - m.v0**2) / (1.0 - m.a * m.v0), "I_log")
        + Q0 * _log_arg(m.v0 / m.a, "I_log")
        - S * _log_arg((1.0 - m.v0 * m.b) / (1.0 - m.a * m.b), "I_log")
        - Q1 * _log_arg(abs(m.c) * (m.v0 - m.a), "I_log")
    )


def w_potential(m: ConformalMap, u_Z: float) -> float:
    """Closed form of ``W(Z) = int log|Z - z|^2 mu(z) d^2 z`` at ``Z = zeta(u_Z)``.

    ``u_Z`` must lie in ``(0, 1]`` so that ``Z`` is on or outside the
    droplet boundary.  The two values entering the energy are ``u_Z = 1``
    (the boundary point on the real axis) and ``u_Z = v0`` (``Z = w``).
    """
    if not 0.0 < u_Z <= 1.0:
        raise ValueError(f"u_Z must lie in (0, 1], got {u_Z}")
    T = _t_ratio(m)
    half = (
        -(m.Q0 + 1.0) * _log_arg(1.0 - u_Z * m.a, "W")
        + m.Q1 * T * _log_arg(1.0 - u_Z * m.v0, "W")
        - m.Q1 * _log_arg(1.0 - u_Z / m.v1, "W")
        + _log_arg(m.R / u_Z, "W")
    )
    return 2.0 * half


def variational_constant(m: ConformalMap) -> float:
    """Constant ``C`` of the equilibrium identity, read off at ``z = zeta(1)``."""
    S = m.total
    z1 = complex(m.zeta(1.0)).real
    return (
        -S * _log_arg(1.0 + z1**2, "C")
        + m.Q1 * _log_arg((m.w - z1) ** 2, "C")
        + w_potential(m, 1.0)
    )


def k_pre(cfg: ChargeConfig, m: ConformalMap | None = None) -> EnergyBreakdown:
    """Pre-critical constant ``(4/(beta N^2)) log K^pre`` with its ingredients.

    Assembles the droplet log-integral, the potentials ``W(zeta(1))`` and
    ``W(w)`` (the latter evaluated at ``u_Z = v0`` since ``zeta(v0) = w``),
    the self-energy compensation ``2 Q1 (1+Q0) log(1+w^2)`` and the
    variational constant.
    """
    phase = classify_phase(cfg)
    if phase.tag is not PhaseTag.PRE_CRITICAL:
        raise ValueError(
            f"k_pre needs a pre-critical configuration (w_cri={phase.w_cri:.6g}); use k_post"
        )
    if m is None:
        m = build_map(cfg)
    Q0, Q1, w = cfg.Q0, cfg.Q1, cfg.w
    S = cfg.total
    z1 = complex(m.zeta(1.0)).real
    I_log = integral_log_density(m)
    W1 = w_potential(m, 1.0)
    Ww = w_potential(m, m.v0)
    log_k = (
        S * _log_arg(1.0 + z1**2, "k_pre")
        - Q1 * _log_arg((w - z1) ** 2, "k_pre")
        - W1
        + S * I_log
        - Q1 * Ww
        + 2.0 * Q1 * (1.0 + Q0) * math.log(1.0 + w**2)
    )
    return EnergyBreakdown(
        I_log=I_log,
        W_zeta1=W1,
        W_w=Ww,
        C_const=variational_constant(m),
        K_pre=log_k,
        K_post=k_post(Q0, Q1),
    )


def k_pre_critical_limit(Q0: float) -> float:
    """Equal-charge limit of ``(4/(beta N^2)) log K^pre`` at the phase boundary.

    Assembled from the analytic limits of each ingredient at
    ``Q0 = 1/(w_s^2 - 1)``; it reproduces :func:`k_post` at equal charges,
    which is the continuity of the energy across the transition.
    """
    ws2 = 1.0 + 1.0 / Q0  # critical w_s^2 for equal charges
    ws = math.sqrt(ws2)
    S = 1.0 + 2.0 * Q0
    log_1_z1sq = math.log((1.0 + ws2) ** 3 / (3.0 * ws2 - 1.0) ** 2)
    log_w_z1 = math.log((1.0 + ws2) ** 2 / (2.0 * ws * (3.0 * ws2 - 1.0)))
    W1 = 2.0 * (
        -(Q0 + 1.0) * math.log((3.0 * ws2 - 1.0) / (ws2 + 1.0))
        - Q0 * math.log(0.5 * (1.0 + 1.0 / ws2))
        + math.log(ws)
    )
    Ww = 2.0 * (
        -(Q0 + 1.0) * math.log(2.0 * ws2 / (1.0 + ws2))
        - Q0 * math.log(0.5 * (1.0 + 1.0 / ws2))
        + math.log(ws)
    )
    I_log = (
        1.0
        + math.log(2.0)
        - (2.0 * Q0 - 1.0) * math.log(1.0 + 1.0 / (2.0 * Q0))
        - math.log(1.0 + 1.0 / Q0)
    )
    log_1_w2 = math.log((1.0 + ws2) ** 2 / (4.0 * ws2))
    return (
        S * log_1_z1sq
        - 2.0 * Q0 * log_w_z1
        - W1
        + S * I_log
        - Q0 * Ww
        + 2.0 * Q0 * (1.0 + Q0) * log_1_w2
    )


def k_pre_large_w(Q0: float, Q1: float, w: float) -> float:
    """Leading large-``w`` behaviour of ``(4/(beta N^2)) log K^pre``.

    Assembled from the disk limits of the droplet integrals:
    ``2 Q0 Q1 log w^2 + S + S log(1+1/(Q0+Q1)) + log(Q0+Q1)
    - S (Q0+Q1) log(1+1/(Q0+Q1))``.
    """
    QQ = Q0 + Q1
    S = 1.0 + QQ
    return (
        2.0 * Q0 * Q1 * math.log(w**2)
        + S
        + S * math.log1p(1.0 / QQ)
        + math.log(QQ)
        - S * QQ * math.log1p(1.0 / QQ)
    )


def energy_constant(log_k: float) -> float:
    """Energy constant of the phase diagram, ``-(1/(beta N^2)) log K = -log_k/4``."""
    return -0.25 * log_k
