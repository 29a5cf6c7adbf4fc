import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import betainc

from spheregas.geometry import ChargeConfig, critical_w
from spheregas.jue import (
    charges_to_jacobi,
    constrained_density,
    energy_identity_check,
    jue_gap_quadrature,
    log_selberg_j,
    rate_function_S,
    s_difference,
    selberg_j,
    soft_edge_scale,
    soft_edge_window,
    wachter,
)


def integrate_sqrt_edges(f, lo, hi):
    """Quadrature with inverse-square-root handling at the upper endpoint."""

    def g(s):
        x = hi - (hi - lo) * s**2
        return f(x) * 2.0 * (hi - lo) * s

    return quad(g, 0.0, 1.0, limit=200, epsabs=1e-12)[0]


class TestWachter:
    def test_figure_edges(self):
        spec = wachter(4.0, 2.0)
        assert abs(spec.cJ - 0.274) < 1e-3
        assert abs(spec.dJ - 0.914) < 1e-3

    def test_normalisation(self):
        spec = wachter(4.0, 2.0)
        val = quad(
            lambda t: spec.density(spec.cJ + (spec.dJ - spec.cJ) * 0.5 * (1 - math.cos(t)))
            * (spec.dJ - spec.cJ) * 0.5 * math.sin(t),
            0.0, math.pi, limit=200,
        )[0]
        assert abs(val - 1.0) < 1e-8

    def test_charges_mapping(self):
        g1, g2 = charges_to_jacobi(4.0, 2.0)
        assert g1 == 1.0 and g2 == 0.5

    def test_edge_equals_phase_condition(self):
        # post-critical <=> 1/(1+w^2) > dJ, i.e. w_cri^2 = (1-dJ)/dJ
        for (q0, q1) in ((4, 4), (4, 2), (1.3, 0.7), (9, 2)):
            spec = wachter(*charges_to_jacobi(q0, q1))
            wc = critical_w(q0, q1)
            assert abs(1.0 / (1.0 + wc**2) - spec.dJ) < 1e-13

    def test_domain(self):
        with pytest.raises(ValueError):
            wachter(-0.5, 1.0)


class TestConstrained:
    def test_left_edge_from_normalisation(self):
        # independent oracle: the left edge is the unique L for which the
        # constrained density integrates to one
        spec = wachter(4.0, 2.0)
        cj = constrained_density(spec, 0.75)

        def norm_of(L):
            g1, g2 = spec.gamma1, spec.gamma2
            lead = g1 * math.sqrt(0.75 / L) / (2 + g1 + g2)

            def rho(x):
                return ((g1 + g2 + 2) * math.sqrt((x - L) / (0.75 - x))
                        * (lead - x) / (2 * math.pi * x * (1 - x)))

            return integrate_sqrt_edges(rho, L, 0.75)

        L_oracle = brentq(lambda L: norm_of(L) - 1.0, 0.05, 0.73, xtol=1e-13)
        assert abs(cj.L - L_oracle) < 1e-10

    def test_normalisation(self):
        spec = wachter(4.0, 2.0)
        cj = constrained_density(spec, 0.75)
        val = integrate_sqrt_edges(cj.density, cj.L, cj.zeta)
        assert abs(val - 1.0) < 1e-8

    def test_wall_at_edge_reduces_to_wachter(self):
        spec = wachter(4.0, 2.0)
        cj = constrained_density(spec, spec.dJ)
        assert abs(cj.L - spec.cJ) < 1e-12
        xs = np.linspace(spec.cJ + 1e-6, spec.dJ - 1e-6, 200)
        assert np.max(np.abs(cj.density(xs) - spec.density(xs))) < 1e-10

    def test_wall_beyond_edge_clamps(self):
        spec = wachter(4.0, 2.0)
        cj = constrained_density(spec, 0.99)
        assert cj.zeta == spec.dJ and abs(cj.L - spec.cJ) < 1e-12

    def test_nonnegative_density(self):
        spec = wachter(4.0, 2.0)
        cj = constrained_density(spec, 0.5)
        xs = np.linspace(cj.L + 1e-9, cj.zeta - 1e-9, 500)
        assert np.all(cj.density(xs) >= 0)

    def test_domain(self):
        spec = wachter(4.0, 2.0)
        with pytest.raises(ValueError):
            constrained_density(spec, -0.1)

    def test_equal_charges_hard_edge(self):
        # gamma1 = 0 pins the support to the hard edge at zero
        spec = wachter(0.0, 0.5)
        cj = constrained_density(spec, 0.5)
        assert cj.L == 0.0
        val = integrate_sqrt_edges(lambda x: cj.density(x) if x > 1e-300 else 0.0,
                                   0.0, 0.5)
        assert abs(val - 1.0) < 1e-8


class TestRateFunction:
    def test_zero_at_free_edge(self):
        spec = wachter(4.0, 2.0)
        assert s_difference(spec, spec.dJ) == 0.0
        assert s_difference(spec, 0.95) == 0.0

    def test_positive_increasing_below_edge(self):
        spec = wachter(4.0, 2.0)
        zs = np.linspace(0.3, spec.dJ - 1e-4, 25)
        vals = [s_difference(spec, z) for z in zs]
        assert all(v > 0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_third_order_vanishing(self):
        spec = wachter(4.0, 2.0)
        eps = np.geomspace(1e-4, 1e-2, 10)
        vals = np.array([s_difference(spec, spec.dJ - e) for e in eps])
        p = np.polyfit(np.log(eps), np.log(vals), 1)[0]
        assert abs(p - 3.0) < 0.1

    def test_domain(self):
        spec = wachter(4.0, 2.0)
        with pytest.raises(ValueError):
            rate_function_S(spec, -0.1, 0.5)
        with pytest.raises(ValueError):
            rate_function_S(spec, 0.7, 0.5)


class TestIdentity:
    def test_asymmetric_grid(self):
        # both sides cancel to ~(w-w_cri)^3 near the transition, so allow a
        # tiny absolute floor from the catastrophic cancellation there
        wc = critical_w(4.0, 2.0)
        for w in np.geomspace(wc * 1.05, 10.0, 12):
            rep = energy_identity_check(ChargeConfig(4.0, 2.0, float(w)))
            assert rep.rel_residual < 1e-10 or abs(rep.lhs - rep.rhs) < 1e-11

    def test_equal_charges(self):
        # gamma1 = 0 route (hard edge at zero) must satisfy the identity too
        wc = critical_w(4.0, 4.0)
        for w in (wc * 1.2, 1.0, 3.0):
            rep = energy_identity_check(ChargeConfig(4.0, 4.0, float(w)))
            assert rep.rel_residual < 1e-10 or abs(rep.lhs - rep.rhs) < 1e-11

    def test_near_critical_small_positive(self):
        # both sides vanish like (w - w_cri)^3: at 1e-3 above the transition
        # they are positive and tiny, and agree to the cancellation floor
        wc = critical_w(4.0, 2.0)
        rep = energy_identity_check(ChargeConfig(4.0, 2.0, wc * (1 + 1e-3)))
        assert 0 < rep.lhs < 1e-8
        assert 0 < rep.rhs < 1e-8
        assert abs(rep.lhs - rep.rhs) < 1e-10

    def test_large_w_matches_expansion(self):
        from spheregas.energy import k_pre_large_w, k_post

        w = 50.0
        rep = energy_identity_check(ChargeConfig(4.0, 2.0, w))
        approx = (k_pre_large_w(4.0, 2.0, w) - k_post(4.0, 2.0)) / (2 * 2.0**2)
        assert abs(rep.lhs - approx) / approx < 1e-3


class TestSoftEdge:
    def test_trig_identities(self):
        s = soft_edge_scale(4.0, 2.0)
        assert abs(s.c_frak**2 + s.s_frak**2 - 1.0) < 1e-14
        assert abs(s.ct_frak**2 + s.st_frak**2 - 1.0) < 1e-14

    def test_alpha_positive(self):
        for (q0, q1) in ((4, 2), (4, 4), (1, 0.3), (10, 9)):
            assert soft_edge_scale(q0, q1).alpha_scale > 0

    def test_window_placement(self):
        q0, q1 = 4.0, 2.0
        scale = soft_edge_scale(q0, q1)
        spec = wachter(*charges_to_jacobi(q0, q1))
        s, N = 1.3, 400.0
        val = soft_edge_window(scale, spec, s, N)
        assert abs(val - spec.dJ - s / (scale.alpha_scale * N ** (2 / 3))) < 1e-16

    def test_requires_ordered_charges(self):
        with pytest.raises(ValueError):
            soft_edge_scale(2.0, 4.0)


class TestGapQuadrature:
    def test_full_support_limit(self):
        val = jue_gap_quadrature(2, 1.0, 2.0, 1.0 - 1e-12)
        assert abs(val - 1.0) < 1e-8

    def test_r1_against_beta_integral(self):
        # one eigenvalue: ratio of incomplete to complete Beta integrals
        a, b, s = 1.5, 2.0, 0.6
        val = jue_gap_quadrature(1, a, b, s)
        ref = betainc(a + 1, b + 1, s)
        assert abs(val - ref) < 1e-12

    def test_r2_against_rejection_mc(self, rng):
        a, b, s = 1.0, 2.0, 0.6
        n = 10_000_000
        t1 = rng.beta(a + 1, b + 1, n)
        t2 = rng.beta(a + 1, b + 1, n)
        acc = rng.random(n) < (t2 - t1) ** 2
        hits = (t1[acc] < s) & (t2[acc] < s)
        p = hits.mean()
        err = math.sqrt(p * (1 - p) / acc.sum())
        val = jue_gap_quadrature(2, a, b, s)
        assert abs(val - p) < 3 * err

    def test_selberg_value(self):
        xs, ws = np.polynomial.legendre.leggauss(40)
        t = 0.5 * (xs + 1)
        wq = 0.5 * ws
        t1, t2 = t[:, None], t[None, :]
        direct = float(np.sum(((1 - t1) * (1 - t2)) * (t2 - t1) ** 2 * wq[:, None] * wq[None, :]))
        assert abs(direct - selberg_j(2, 0.0, 1.0)) < 1e-14
        assert abs(math.log(direct) - log_selberg_j(2, 0.0, 1.0)) < 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            jue_gap_quadrature(4, 0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            jue_gap_quadrature(2, 0.0, 1.0, 1.5)
