"""Sphere/plane coordinate machinery, spherical caps and phase classification.

The gas lives on a sphere of radius 1/2.  Points are carried either as a
Cayley-Klein pair ``(u, v)`` with ``|u|^2 + |v|^2 = 1`` or as the image
``z = e^{i phi} tan(theta/2)`` of the stereographic projection from the
south pole.  Two macroscopic charges ``Q0*N`` (south pole) and ``Q1*N``
(at the projected point ``w > 0``) split the phase diagram into a
post-critical regime (the caps carved out around the charges are disjoint)
and a pre-critical regime (they overlap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "PointAtInfinityError",
    "ChargeConfig",
    "PhaseTag",
    "Phase",
    "SphericalPoint",
    "project_to_plane",
    "project_to_sphere",
    "chord_distance",
    "w_to_ws",
    "ws_to_w",
    "critical_w",
    "classify_phase",
    "cap_angular_radii",
    "cap_overlap",
    "CRITICAL_RTOL",
]

# Relative half-width of the band around w_cri that is tagged Critical.
# Inside it the conformal-map parameters degenerate (v0 -> 1) and callers
# must branch to the limiting circle droplet.
CRITICAL_RTOL = 1e-10


class PointAtInfinityError(ValueError):
    """Stereographic projection was requested at the south pole."""


@dataclass(frozen=True)
class ChargeConfig:
    """The physical problem: charge fractions ``Q0 >= Q1`` and position ``w``.

    ``Q0`` always labels the charge at the south pole.  Inputs with
    ``Q1 > Q0`` are normalised by swapping the two charges, which is
    admissible because the sphere can be rotated so that the larger charge
    sits at the south pole.

    Parameters
    ----------
    Q0, Q1 : float
        Dimensionless charge fractions; the actual charges are ``Q0*N``
        and ``Q1*N``.  Both must be positive.
    w : float
        Stereographic image of the second charge, on the positive real axis.
    """

    Q0: float
    Q1: float
    w: float
    swapped: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not (self.Q0 > 0 and self.Q1 > 0):
            raise ValueError(f"charges must be positive, got Q0={self.Q0}, Q1={self.Q1}")
        if not self.w > 0:
            raise ValueError(f"w must be positive, got w={self.w}")
        if self.Q1 > self.Q0:
            q0, q1 = self.Q1, self.Q0
            object.__setattr__(self, "Q0", q0)
            object.__setattr__(self, "Q1", q1)
            object.__setattr__(self, "swapped", True)

    @property
    def total(self) -> float:
        """Total charge fraction ``1 + Q0 + Q1`` (mobile charges included)."""
        return 1.0 + self.Q0 + self.Q1

    def to_dict(self) -> dict:
        return {"Q0": self.Q0, "Q1": self.Q1, "w": self.w}


class PhaseTag(Enum):
    POST_CRITICAL = "post-critical"
    PRE_CRITICAL = "pre-critical"
    CRITICAL = "critical"


@dataclass(frozen=True)
class Phase:
    tag: PhaseTag
    w_cri: float

    @property
    def is_pre(self) -> bool:
        return self.tag is PhaseTag.PRE_CRITICAL

    @property
    def is_post(self) -> bool:
        return self.tag is PhaseTag.POST_CRITICAL


@dataclass(frozen=True)
class SphericalPoint:
    """Cayley-Klein pair ``u = cos(theta/2) e^{i phi/2}``, ``v = -i sin(theta/2) e^{-i phi/2}``."""

    u: complex
    v: complex

    def __post_init__(self):
        n = abs(self.u) ** 2 + abs(self.v) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"|u|^2+|v|^2 = {n}, expected 1")

    @property
    def theta(self) -> float:
        return 2.0 * math.atan2(abs(self.v), abs(self.u))


def project_to_plane(p: SphericalPoint) -> complex:
    """Stereographic image ``z = e^{i phi} tan(theta/2)`` of a sphere point.

    Raises
    ------
    PointAtInfinityError
        If ``p`` is the south pole (``u = 0``), whose image is infinite.
    """
    if abs(p.u) < 1e-15:
        raise PointAtInfinityError("south pole projects to the point at infinity")
    # z = tan(theta/2) e^{i phi} = -i conj(v)/conj(u), phase halves recombine
    return -1j * np.conj(p.v) / np.conj(p.u)


def project_to_sphere(z: complex) -> SphericalPoint:
    """Inverse stereographic projection onto the canonical Cayley-Klein pair.

    The overall sign of ``(u, v)`` is fixed by taking the azimuth
    ``phi = arg z`` in ``(-pi, pi]`` and using ``e^{i phi/2}`` with
    ``phi/2`` in ``(-pi/2, pi/2]``.
    """
    z = complex(z)
    theta = 2.0 * math.atan(abs(z))
    phi = math.atan2(z.imag, z.real) if z != 0 else 0.0
    half = np.exp(0.5j * phi)
    return SphericalPoint(u=math.cos(theta / 2) * half, v=-1j * math.sin(theta / 2) / half)


def chord_distance(p: SphericalPoint, q: SphericalPoint) -> float:
    """Chord length ``|u'v - uv'|`` between two points on the radius-1/2 sphere."""
    return abs(q.u * p.v - p.u * q.v)


def w_to_ws(w: float) -> float:
    """Map the south-pole-placement coordinate ``w`` to the symmetric one.

    ``w_s = w + sqrt(w^2 + 1)``; the rotated configuration puts two equal
    charges at ``+w_s`` and ``-1/w_s`` symmetric about the south pole.
    """
    if w <= 0:
        raise ValueError("w must be positive")
    return w + math.hypot(w, 1.0)


def ws_to_w(ws: float) -> float:
    """Inverse of :func:`w_to_ws`: ``w = (w_s - 1/w_s)/2``."""
    if ws <= 1:
        raise ValueError("w_s must exceed 1")
    return 0.5 * (ws - 1.0 / ws)


def critical_w(Q0: float, Q1: float):
    """Phase boundary ``w_cri`` separating post- (``w < w_cri``) from pre-critical.

    ``w_cri = (2 Q0 Q1 + Q0 + Q1 + 2 sqrt(Q0 Q1 (1+Q0)(1+Q1)))^{-1/2}``.
    Symmetric in ``Q0 <-> Q1``; for equal charges it reduces to
    ``1/sqrt(4 Q0 (1 + Q0))``.
    """
    Q0 = np.asarray(Q0, dtype=float)
    Q1 = np.asarray(Q1, dtype=float)
    if np.any(Q0 <= 0) or np.any(Q1 <= 0):
        raise ValueError("charges must be positive")
    out = (2 * Q0 * Q1 + Q0 + Q1 + 2 * np.sqrt(Q0 * Q1 * (1 + Q0) * (1 + Q1))) ** -0.5
    return float(out) if out.ndim == 0 else out


def classify_phase(cfg: ChargeConfig) -> Phase:
    """Classify a configuration, with a narrow Critical band around ``w_cri``."""
    wc = critical_w(cfg.Q0, cfg.Q1)
    if abs(cfg.w - wc) <= CRITICAL_RTOL * max(1.0, wc):
        tag = PhaseTag.CRITICAL
    elif cfg.w > wc:
        tag = PhaseTag.PRE_CRITICAL
    else:
        tag = PhaseTag.POST_CRITICAL
    return Phase(tag=tag, w_cri=wc)


def cap_angular_radii(Q0: float, Q1: float) -> tuple[float, float]:
    """Angular radii of the caps carved out around the two external charges.

    The cap about the charge ``Qi*N`` takes up the fraction
    ``Qi/(Q0+Q1+1)`` of the sphere, so its angular radius ``psi`` obeys
    ``sin^2(psi/2) = Qi/(Q0+Q1+1)``.  The stereographic radius of the
    south-pole cap boundary is ``sqrt((Q1+1)/Q0)``.
    """
    S = 1.0 + Q0 + Q1
    return 2.0 * math.asin(math.sqrt(Q0 / S)), 2.0 * math.asin(math.sqrt(Q1 / S))


def cap_overlap(cfg: ChargeConfig) -> bool:
    """Direct cap-geometry test: do the two excluded spherical caps intersect?

    Constructs the caps of area fractions ``Q0/(Q0+Q1+1)`` about the south
    pole and ``Q1/(Q0+Q1+1)`` about the projected point ``w`` and compares
    the angular separation of their centres with the sum of the angular
    radii.  Must agree with :func:`classify_phase`
    (overlap <=> pre-critical); the two are computed by unrelated routes.
    """
    if cfg.Q1 == 0:
        return False
    psi0, psi1 = cap_angular_radii(cfg.Q0, cfg.Q1)
    theta_w = 2.0 * math.atan(cfg.w)
    separation = math.pi - theta_w
    return separation < psi0 + psi1
