"""Brute-force quadrature over the droplet, used as the oracle for the
closed-form energies.

Area integrals are done in polar coordinates about a chosen centre.  For
each ray the intersections with the droplet boundary are located on a dense
polyline and polished with Newton on the exact map, so the domain is
resolved to machine precision even when the droplet is a thin crescent and
a ray crosses it several times.  Potentials ``W(Z)`` are integrated in
polar coordinates centred at ``Z`` itself, where the area element cancels
the logarithmic singularity; the angular integral is adaptive because rays
tangent to the boundary produce square-root kinks.  For ``Z`` strictly
inside the droplet a faster route pulls the complement back to the unit
disk, where the integrand is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .conformal import ConformalMap, droplet_boundary

__all__ = ["QuadratureError", "DropletQuadrature", "OracleReport", "energy_quadrature_oracle"]


class QuadratureError(RuntimeError):
    """Raised when the requested accuracy could not be certified."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class DropletQuadrature:
    """Polar-ray quadrature over the droplet of one conformal map."""

    def __init__(self, m: ConformalMap, n_boundary: int = 8192):
        self.m = m
        self.n_boundary = n_boundary
        theta = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
        self.theta = theta
        self.pts = m.zeta(np.exp(1j * theta))
        self.curve = droplet_boundary(m, 4096)
        span_x = self.pts.real.max() - self.pts.real.min()
        span_y = self.pts.imag.max() - self.pts.imag.min()
        self.diameter = float(math.hypot(span_x, span_y))
        self._S = m.total
        self._disk_cache = {}

    # -- ray geometry -------------------------------------------------------

    def _crossings_one(self, rel: np.ndarray, P: complex, phi: float,
                       exclude_k: int | None = None, exclude_w: int = 4) -> np.ndarray:
        """Sorted positive boundary distances along one ray ``P + s e^{i phi}``.

        ``exclude_k`` masks polyline segments around a parameter index
        (used for centres lying on the boundary, where the trivial ``s = 0``
        root would otherwise capture the Newton iteration).
        """
        rot = np.exp(-1j * phi)
        im = (rel * rot).imag
        im_next = np.roll(im, -1)
        seg = np.nonzero(np.signbit(im) != np.signbit(im_next))[0]
        if exclude_k is not None and seg.size:
            d = np.abs((seg - exclude_k + self.n_boundary // 2) % self.n_boundary
                       - self.n_boundary // 2)
            seg = seg[d > exclude_w]
        if seg.size == 0:
            return np.empty(0)
        y1 = im[seg]
        y2 = im_next[seg]
        t = np.where(y1 != y2, y1 / (y1 - y2), 0.5)
        th = self.theta[seg] + t * (2.0 * np.pi / self.n_boundary)
        for _ in range(4):
            e = np.exp(1j * th)
            g = ((self.m.zeta(e) - P) * rot).imag
            gp = (self.m.zeta_prime(e) * 1j * e * rot).imag
            gp = np.where(np.abs(gp) < 1e-300, 1.0, gp)
            th = th - g / gp
        s = ((self.m.zeta(np.exp(1j * th)) - P) * rot).real
        s = s[s > 1e-11 * self.diameter]
        if s.size == 0:
            return np.empty(0)
        s = np.sort(s)
        keep = np.concatenate([[True], np.diff(s) > 1e-11 * self.diameter])
        return s[keep]

    def ray_crossings(self, P: complex, phis: np.ndarray):
        rel = self.pts - P
        return [self._crossings_one(rel, P, float(phi)) for phi in phis]

    def _inside_starts(self, P: complex, phis: np.ndarray, first_cross: np.ndarray) -> np.ndarray:
        """Whether each ray sits inside the droplet just beyond ``P``."""
        eps = np.where(first_cross > 0,
                       np.minimum(0.5 * first_cross, 1e-6 * self.diameter),
                       1e-6 * self.diameter)
        probes = P + eps * np.exp(1j * phis)
        return self.curve.contains(probes)

    def _intervals(self, P: complex, phis: np.ndarray):
        """Per-ray list of (s_lo, s_hi) sub-intervals lying inside the droplet."""
        crossings = self.ray_crossings(P, phis)
        first = np.array([c[0] if len(c) else 0.0 for c in crossings])
        starts_inside = self._inside_starts(P, phis, first)
        intervals = []
        for c, inside in zip(crossings, starts_inside):
            ends = np.concatenate([[0.0], c]) if inside else c
            pairs = [(ends[j], ends[j + 1]) for j in range(0, len(ends) - 1, 2)]
            intervals.append(pairs)
        return intervals

    # -- fixed-grid area integration (smooth integrands) ---------------------

    def integrate(self, integrand, center: complex, n_phi: int = 1024, n_s: int = 48) -> float:
        """``int integrand(s, z) mu(z) s ds dphi`` over the droplet.

        Trapezoid in the angle, Gauss-Legendre on each inside-interval of
        each ray.  Spectrally accurate when the angular integrand is smooth
        (interior centre, no tangency kinks); use :meth:`w_potential` for
        logarithmic kernels anchored on or outside the boundary.
        """
        phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
        gl_x, gl_w = np.polynomial.legendre.leggauss(n_s)
        intervals = self._intervals(center, phis)
        los, his, idx = [], [], []
        for i, pairs in enumerate(intervals):
            for (lo, hi) in pairs:
                los.append(lo)
                his.append(hi)
                idx.append(i)
        if not los:
            return 0.0
        los = np.array(los)[:, None]
        his = np.array(his)[:, None]
        s = 0.5 * (his - los) * gl_x[None, :] + 0.5 * (his + los)
        ws = 0.5 * (his - los) * gl_w[None, :]
        z = center + s * np.exp(1j * phis[np.array(idx)])[:, None]
        mu = (self._S / np.pi) / (1.0 + np.abs(z) ** 2) ** 2
        return float(np.sum(integrand(s, z) * mu * s * ws)) * (2.0 * np.pi / n_phi)

    def _interior_center(self) -> complex:
        """A point of the droplet on the real axis (midpoint of the widest slab)."""
        far_left = complex(self.pts.real.min() - 1.0 - self.diameter, 0.0)
        cross = self.ray_crossings(far_left, np.array([0.0]))[0]
        if len(cross) < 2 or len(cross) % 2 != 0:
            raise QuadratureError("could not slice the droplet on the real axis", math.inf)
        widths = cross[1::2] - cross[0::2]
        k = int(np.argmax(widths))
        return far_left + 0.5 * (cross[2 * k] + cross[2 * k + 1])

    def normalization(self, epsabs: float = 1e-10) -> float:
        """``int mu d^2 z`` over the droplet; equals 1 for a valid map."""
        zc = self._interior_center()
        return self.area_integral(lambda s, z: np.ones_like(s), zc, epsabs=epsabs)

    def integral_log_density(self, epsabs: float = 1e-10) -> float:
        zc = self._interior_center()
        return self.area_integral(lambda s, z: np.log1p(np.abs(z) ** 2), zc, epsabs=epsabs)

    def _tangency_angles(self, Z: complex, rel: np.ndarray, on_boundary: bool) -> np.ndarray:
        """Ray directions from ``Z`` that are tangent to the boundary.

        The winding of ``zeta(e^{i theta}) - Z`` reverses exactly at
        tangency; flips of ``Im[conj(rel_k) rel_{k+1}]`` locate them on the
        polyline and Newton on the tangency condition polishes the
        parameter.  For a boundary centre the two tangent directions at the
        centre itself are appended.
        """
        mask = np.abs(rel) > 1e-8 * self.diameter
        cr = (np.conj(rel) * np.roll(rel, -1)).imag
        valid = mask & np.roll(mask, -1)
        flips = np.nonzero(valid & np.roll(valid, -1)
                           & (np.signbit(cr) != np.signbit(np.roll(cr, -1))))[0]
        angles = []
        for k in flips:
            th = self.theta[(k + 1) % self.n_boundary]
            for _ in range(30):
                e = np.exp(1j * th)
                d = self.m.zeta(e) - Z
                tang = 1j * e * self.m.zeta_prime(e)
                g = (np.conj(d) * tang).imag
                # derivative of g wrt theta, numerically (second derivative of map)
                h = 1e-7
                e2 = np.exp(1j * (th + h))
                g2 = (np.conj(self.m.zeta(e2) - Z) * (1j * e2 * self.m.zeta_prime(e2))).imag
                gp = (g2 - g) / h
                if gp == 0:
                    break
                step = g / gp
                th -= step
                if abs(step) < 1e-13:
                    break
            d = self.m.zeta(np.exp(1j * th)) - Z
            if abs(d) > 1e-8 * self.diameter:
                angles.append(math.atan2(d.imag, d.real))
        if on_boundary:
            k0 = int(np.argmin(np.abs(rel)))
            e0 = np.exp(1j * self.theta[k0])
            tau = 1j * e0 * self.m.zeta_prime(e0)
            ta = math.atan2(tau.imag, tau.real)
            angles += [ta, ta + math.pi]
        return np.array(angles)

    def area_integral(self, integrand, center: complex, epsabs: float = 1e-10) -> float:
        """Adaptive-angle area integral ``int integrand(s, z) mu s ds dphi``.

        The angle range is split at every tangency direction seen from the
        centre; on each panel the interval structure of the rays is fixed,
        so adaptive 1D quadrature (which tolerates the square-root panel
        endpoints) converges quickly.  Handles interior, boundary and
        far-exterior centres alike, including crescent droplets where rays
        cross the boundary four times.
        """
        Z = complex(center)
        rel = self.pts - Z
        gl_x, gl_w = np.polynomial.legendre.leggauss(48)
        S = self._S
        mode, inward, k0 = self._ray_start_mode(Z)
        th0 = self.theta[k0] if k0 is not None else None

        def one_angle(phi: float) -> float:
            if mode == "boundary":
                c = self._crossings_one(rel, Z, phi, exclude_k=k0)
                sliver = self._sliver_crossing(Z, th0, phi)
                if sliver is not None and (len(c) == 0
                                           or np.min(np.abs(c - sliver)) > 1e-9 * self.diameter):
                    c = np.sort(np.append(c, sliver))
                inside = (np.exp(1j * phi) * np.conj(inward)).real > 0.0
            else:
                c = self._crossings_one(rel, Z, phi)
                inside = mode == "inside"
            if not inside and len(c) == 0:
                return 0.0
            ends = np.concatenate([[0.0], c]) if inside else c
            total = 0.0
            for j in range(0, len(ends) - 1, 2):
                lo, hi = ends[j], ends[j + 1]
                if lo == 0.0:
                    sig = 0.5 * math.sqrt(hi) * (gl_x + 1.0)
                    wq = 0.5 * math.sqrt(hi) * gl_w
                    s = sig**2
                    jac = 2.0 * sig
                else:
                    s = 0.5 * (hi - lo) * gl_x + 0.5 * (hi + lo)
                    wq = 0.5 * (hi - lo) * gl_w
                    jac = 1.0
                z = Z + s * np.exp(1j * phi)
                mu = (S / np.pi) / (1.0 + np.abs(z) ** 2) ** 2
                total += float(np.sum(integrand(s, z) * mu * s * jac * wq))
            return total

        crit = np.sort(np.mod(self._tangency_angles(Z, rel, mode == "boundary"), 2.0 * np.pi))
        if crit.size == 0:
            edges = np.array([0.0, 2.0 * np.pi])
        else:
            edges = np.concatenate([crit, [crit[0] + 2.0 * np.pi]])
        total = 0.0
        err_total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo < 1e-13:
                continue
            val, err = quad(one_angle, lo, hi, limit=300,
                            epsabs=0.5 * epsabs, epsrel=1e-12)
            total += val
            err_total += err
        self.last_error_estimate = err_total
        return total

    # -- logarithmic potential ------------------------------------------------

    def _ray_start_mode(self, Z: complex):
        """Classify how rays from ``Z`` begin: inside, outside, or boundary.

        For a boundary centre the inward direction is read off the map
        (``+ e^{i theta} zeta'`` points into the droplet since the disk
        interior maps to the exterior), so per-ray membership probes are
        unnecessary.  Returns ``(mode, inward, k0)`` with ``k0`` the
        polyline index of the centre when it lies on the boundary.
        """
        dist = np.abs(self.pts - Z)
        k = int(np.argmin(dist))
        if dist[k] < 1e-9 * self.diameter:
            e = np.exp(1j * self.theta[k])
            inward = e * self.m.zeta_prime(e)
            return "boundary", complex(inward / abs(inward)), k
        inside = bool(self.curve.contains(np.array([Z]))[0])
        return ("inside" if inside else "outside"), None, None

    def _sliver_crossing(self, Z: complex, th0: float, phi: float) -> float | None:
        """Near-centre boundary crossing for a centre on the curve.

        Close to the tangent direction the genuine crossing merges with the
        trivial root at the centre itself; a Newton iteration on the
        deflated function ``G(theta)/(theta - th0)`` separates them.
        Returns the crossing distance, or None when the local model puts it
        behind the ray or out of the near field.
        """

        def f(th):
            return self.m.zeta(np.exp(1j * th)) - Z

        rot = np.exp(-1j * phi)
        h = 1e-5
        T1 = (f(th0 + h) - f(th0 - h)) / (2.0 * h)
        T2 = (f(th0 + h) - 2.0 * f(th0) + f(th0 - h)) / h**2
        a1 = (T1 * rot).imag
        a2 = (T2 * rot).imag
        if abs(a2) < 1e-13:
            return None
        th = th0 - 2.0 * a1 / a2
        if abs(th - th0) > 0.25:
            return None
        for _ in range(60):
            dth = th - th0
            if dth == 0.0:
                return None
            G = (f(th) * rot).imag
            Gp = ((f(th + 1e-7) * rot).imag - G) / 1e-7
            H = G / dth
            Hp = Gp / dth - G / dth**2
            if Hp == 0.0:
                break
            step = H / Hp
            th -= step
            if abs(step) < 1e-13:
                break
        s = (f(th) * rot).real
        if s > 1e-11 * self.diameter:
            return float(s)
        return None

    def w_potential(self, Z: complex, epsabs: float = 1e-10) -> float:
        """``W(Z) = int log|Z - z|^2 mu d^2 z`` for ``Z`` anywhere in the plane.

        Polar coordinates centred at ``Z`` make the integrand
        ``2 s log(s) mu`` regular, so no singularity splitting is needed
        even with ``Z`` on the boundary; the angular integral is adaptive
        to absorb the tangency kinks.  Radial sub-intervals starting at the
        centre use an ``s = sigma^2`` substitution to tame ``s log s``.
        """
        return self.area_integral(lambda s, z: 2.0 * np.log(s), complex(Z), epsabs=epsabs)

    def _disk_grid(self, n_rho: int = 240, n_theta: int = 384):
        """Pullback grid on the unit disk for complement-side integrals."""
        key = (n_rho, n_theta)
        if key not in self._disk_cache:
            gl_x, gl_w = np.polynomial.legendre.leggauss(n_rho)
            rho = 0.5 * (gl_x + 1.0)
            wr = 0.5 * gl_w
            th = 2.0 * np.pi * np.arange(n_theta) / n_theta
            U = (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
            area = (rho[:, None] * wr[:, None] * np.ones(n_theta)[None, :]).ravel()
            area = area * (2.0 * np.pi / n_theta)
            ZU = self.m.zeta(U)
            g = (self._S / np.pi) * np.abs(self.m.zeta_prime(U)) ** 2 / (1.0 + np.abs(ZU) ** 2) ** 2
            self._disk_cache[key] = (ZU, g * area)
        return self._disk_cache[key]

    def w_potential_interior(self, z_points: np.ndarray) -> np.ndarray:
        """``W`` at points strictly inside the droplet, via the complement.

        ``W(z) = S log(1+|z|^2) - int_{|u|<1} log|z - zeta(u)|^2 g(u) dA``;
        the subtracted integrand is smooth since ``zeta(u)`` never meets an
        interior ``z``.  Vectorised over many evaluation points.
        """
        ZU, wgt = self._disk_grid()
        z_points = np.atleast_1d(np.asarray(z_points, dtype=complex))
        out = np.empty(len(z_points))
        chunk = max(1, int(4e7 // len(ZU)))
        for lo in range(0, len(z_points), chunk):
            zp = z_points[lo : lo + chunk]
            d2 = np.abs(zp[:, None] - ZU[None, :]) ** 2
            out[lo : lo + chunk] = self._S * np.log1p(np.abs(zp) ** 2) - np.log(d2) @ wgt
        return out

    def double_log_energy(self, n_phi_outer: int = 256, n_s_outer: int = 24) -> float:
        """``int int mu(z) mu(z') log|z - z'| d^2z d^2z'``.

        Outer integral over the droplet on the polar grid, inner potential
        ``W(z)/2`` through :meth:`w_potential_interior`; every outer node is
        strictly interior because Gauss nodes avoid interval endpoints.
        """
        zc = self._interior_center()
        phis = 2.0 * np.pi * np.arange(n_phi_outer) / n_phi_outer
        gl_x, gl_w = np.polynomial.legendre.leggauss(n_s_outer)
        intervals = self._intervals(zc, phis)
        zs, wgts = [], []
        for i, pairs in enumerate(intervals):
            for (lo, hi) in pairs:
                s = 0.5 * (hi - lo) * gl_x + 0.5 * (hi + lo)
                ws = 0.5 * (hi - lo) * gl_w
                z = zc + s * np.exp(1j * phis[i])
                mu = (self._S / np.pi) / (1.0 + np.abs(z) ** 2) ** 2
                zs.append(z)
                wgts.append(mu * s * ws * (2.0 * np.pi / n_phi_outer))
        zs = np.concatenate(zs)
        wgts = np.concatenate(wgts)
        W = self.w_potential_interior(zs)
        return float(np.sum(0.5 * W * wgts))

    def equilibrium_residual(self, points) -> np.ndarray:
        """Variational combination at interior points; constant at equilibrium.

        ``-S log(1+|z|^2) + Q1 log|w - z|^2 + W(z)``.
        """
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        W = self.w_potential_interior(points)
        return (
            -self._S * np.log1p(np.abs(points) ** 2)
            + self.m.Q1 * np.log(np.abs(self.m.w - points) ** 2)
            + W
        )

    def interior_points(self, k: int, seed: int = 0) -> np.ndarray:
        """``k`` random points inside the droplet, away from the boundary."""
        rng = np.random.default_rng(seed)
        lo_x, hi_x = self.pts.real.min(), self.pts.real.max()
        lo_y, hi_y = self.pts.imag.min(), self.pts.imag.max()
        out = []
        margin = 0.05 * self.diameter
        while len(out) < k:
            cand = rng.uniform(lo_x, hi_x, 512) + 1j * rng.uniform(lo_y, hi_y, 512)
            inside = self.curve.contains(cand)
            for z in cand[inside]:
                if np.min(np.abs(self.pts[::8] - z)) > margin:
                    out.append(z)
                    if len(out) == k:
                        break
        return np.array(out)


@dataclass(frozen=True)
class OracleReport:
    """Quadrature values for the closed-form comparisons."""

    I_log: float
    W_zeta1: float
    W_w: float
    normalization: float
    error_estimate: float


def energy_quadrature_oracle(m: ConformalMap, rtol: float = 1e-5) -> OracleReport:
    """Integrate ``I_log``, ``W(zeta(1))`` and ``W(w)`` directly over the droplet.

    Raises :class:`QuadratureError` with the achieved estimate when the
    internal error indicators exceed ``rtol``.
    """
    dq = DropletQuadrature(m)
    i_log = dq.integral_log_density()
    e0 = dq.last_error_estimate
    w1 = dq.w_potential(complex(m.zeta(1.0)))
    e1 = dq.last_error_estimate
    ww = dq.w_potential(complex(m.w, 0.0))
    e2 = dq.last_error_estimate
    est = max(e0 / max(1.0, abs(i_log)), e1 / max(1.0, abs(w1)), e2 / max(1.0, abs(ww)))
    if est > rtol:
        raise QuadratureError("droplet quadrature did not converge to rtol", est)
    return OracleReport(
        I_log=i_log,
        W_zeta1=w1,
        W_w=ww,
        normalization=dq.normalization(),
        error_estimate=est,
    )
