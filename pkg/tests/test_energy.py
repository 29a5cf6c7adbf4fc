import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from spheregas.energy import (
    energy_constant,
    integral_log_density,
    k_post,
    k_pre,
    k_pre_critical_limit,
    k_pre_large_w,
    variational_constant,
    w_potential,
)
from spheregas.geometry import ChargeConfig, critical_w
from spheregas.conformal import build_map
from spheregas.quadrature import DropletQuadrature, energy_quadrature_oracle

charges = st.floats(min_value=0.1, max_value=15.0)


def annulus_k_post(Q0, Q1):
    """Independent oracle for the post-critical constant.

    At w = 0 the droplet is the exact annulus sqrt(Q1/(Q0+1)) < |z| <
    sqrt((Q1+1)/Q0) and every droplet integral collapses to elementary 1D
    quadrature; assembling the same energy balance as in the pre-critical
    phase gives K^post without using its closed form.
    """
    S = 1.0 + Q0 + Q1
    t_in = Q1 / (Q0 + 1.0)
    t_out = (Q1 + 1.0) / Q0
    mu_t = lambda t: S / (1.0 + t) ** 2  # radial density after t = |z|^2
    I_log = quad(lambda t: math.log1p(t) * mu_t(t), t_in, t_out, epsabs=1e-13)[0]
    W0 = quad(lambda t: math.log(t) * mu_t(t), t_in, t_out, epsabs=1e-13)[0]
    # mean-value property: W(z_b) = log|z_b|^2 for z_b on the outer rim
    z_b2 = t_out
    return S * math.log1p(z_b2) - Q1 * math.log(z_b2) - math.log(z_b2) + S * I_log - Q1 * W0


class TestKPost:
    @given(charges, charges)
    @settings(max_examples=100, deadline=None)
    def test_symmetry(self, q0, q1):
        assert math.isclose(k_post(q0, q1), k_post(q1, q0), rel_tol=1e-15)

    @pytest.mark.parametrize("q0,q1", [(4, 4), (4, 2), (1, 1), (7, 0.5)])
    def test_annulus_oracle(self, q0, q1):
        assert abs(k_post(q0, q1) - annulus_k_post(q0, q1)) < 1e-10

    def test_equal_charge_reduction(self):
        # K^post at equal charges; the last term carries +2Q^2 log Q, as the
        # annulus oracle and the critical limit of K^pre both confirm
        for q in (1.0, 2.0, 4.0):
            ref = (
                1 + 2 * q + 2 * (1 + 2 * q) * math.log(1 + 2 * q)
                - 2 * (1 + q) ** 2 * math.log(1 + q) + 2 * q**2 * math.log(q)
            )
            assert math.isclose(k_post(q, q), ref, rel_tol=1e-14)

    def test_rejects_bad_charges(self):
        with pytest.raises(ValueError):
            k_post(0.0, 1.0)


class TestIntegralLogDensity:
    def test_large_w_disk_limit(self):
        m = build_map(ChargeConfig(4.0, 2.0, 1e5))
        limit = 1.0 - 6.0 * math.log(1.0 + 1.0 / 6.0)
        assert abs(integral_log_density(m) - limit) < 1e-8

    def test_critical_limit_formula(self):
        # mu -> 1+ at equal charges: 1 + log 2 - (2Q-1) log(1+1/(2Q)) - log(1+1/Q)
        q = 4.0
        wc = critical_w(q, q)
        vals = []
        for f in (1e-4, 1e-5):
            m = build_map(ChargeConfig(q, q, wc * (1 + f)))
            vals.append(integral_log_density(m))
        limit = 1 + math.log(2) - (2 * q - 1) * math.log(1 + 1 / (2 * q)) - math.log(1 + 1 / q)
        assert abs(vals[1] - limit) < 1e-4
        assert abs(vals[1] - limit) < abs(vals[0] - limit)

    def test_quadrature_oracle(self, cfg421, map421):
        orc = energy_quadrature_oracle(map421)
        assert abs(integral_log_density(map421) - orc.I_log) < 1e-9
        assert abs(orc.normalization - 1.0) < 1e-8


class TestWPotential:
    def test_large_w_limit(self):
        # W(Z) -> log|Z|^2 with Z -> R/u_Z
        devs = []
        for w in (1e3, 1e5):
            m = build_map(ChargeConfig(4.0, 2.0, w))
            devs.append(max(
                abs(w_potential(m, u_z) - math.log(abs(complex(m.zeta(u_z))) ** 2))
                for u_z in (0.5, 1.0)
            ))
        assert devs[1] < 0.02 * devs[0]
        assert devs[1] < 1e-4
        m = build_map(ChargeConfig(4.0, 2.0, 1e5))
        assert abs(w_potential(m, 0.5) - math.log((m.R / 0.5) ** 2)) < 1e-5

    def test_domain(self, map421):
        with pytest.raises(ValueError):
            w_potential(map421, 1.5)
        with pytest.raises(ValueError):
            w_potential(map421, 0.0)

    def test_quadrature_oracle(self, map421):
        orc = energy_quadrature_oracle(map421)
        assert abs(w_potential(map421, 1.0) - orc.W_zeta1) < 1e-8
        assert abs(w_potential(map421, map421.v0) - orc.W_w) < 1e-8


class TestKPre:
    def test_rejects_post_critical(self):
        with pytest.raises(ValueError):
            k_pre(ChargeConfig(4.0, 2.0, 0.05))

    def test_critical_limit_matches_post(self):
        # continuity across the transition plus the assembled analytic limit
        for q in (1.0, 2.0, 4.0):
            wc = critical_w(q, q)
            val = k_pre(ChargeConfig(q, q, wc * (1 + 1e-3))).K_pre
            assert abs(val - k_post(q, q)) < 1e-6
            assert abs(k_pre_critical_limit(q) - k_post(q, q)) < 1e-12

    def test_asymmetric_continuity(self):
        wc = critical_w(4.0, 2.0)
        val = k_pre(ChargeConfig(4.0, 2.0, wc * (1 + 1e-3))).K_pre
        assert abs(val - k_post(4.0, 2.0)) < 1e-6

    def test_large_w_expansion(self):
        res = []
        for w in (30.0, 100.0):
            br = k_pre(ChargeConfig(4.0, 2.0, w))
            res.append(abs(br.K_pre - k_pre_large_w(4.0, 2.0, w)))
        assert res[0] / res[1] > 5.0  # residual decays like 1/w^2
        assert res[1] < 5e-3

    def test_large_w_constant_identification(self):
        # the w-independent part of the expansion, measured directly
        br = k_pre(ChargeConfig(4.0, 2.0, 1e5))
        measured = br.K_pre - 16.0 * math.log(1e10)
        S, QQ = 7.0, 6.0
        const = S + S * math.log1p(1 / QQ) + math.log(QQ) - S * QQ * math.log1p(1 / QQ)
        assert abs(measured - const) < 1e-6

    def test_gap_log_sign(self):
        # log of the gap probability is negative: stored K_pre exceeds K_post
        # (equivalently the energy constants satisfy K_N^pre < K_N^post)
        for w in np.geomspace(critical_w(4, 2) * 1.05, 10, 12):
            br = k_pre(ChargeConfig(4.0, 2.0, float(w)))
            assert br.K_pre > br.K_post
            assert energy_constant(br.K_pre) < energy_constant(br.K_post)

    def test_energy_curve_monotone_decrease(self):
        for (q0, q1) in ((4.0, 4.0), (4.0, 2.0)):
            wc = critical_w(q0, q1)
            ws = np.geomspace(wc * 1.02, 20.0, 24)
            vals = [energy_constant(k_pre(ChargeConfig(q0, q1, float(w))).K_pre) for w in ws]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_breakdown_fields(self, cfg421):
        br = k_pre(cfg421)
        d = br.to_dict()
        assert set(d) == {"I_log", "W_zeta1", "W_w", "C_const", "K_pre", "K_post"}
        assert np.isfinite(list(d.values())).all()


class TestEquilibrium:
    def test_variational_identity_constant(self, cfg421, map421):
        dq = DropletQuadrature(map421)
        pts = dq.interior_points(20, seed=5)
        res = dq.equilibrium_residual(pts)
        assert res.max() - res.min() < 1e-6
        assert abs(res.mean() - variational_constant(map421)) < 1e-6

    def test_double_integral_against_closed_forms(self, cfg421, map421):
        br = k_pre(cfg421)
        dq = DropletQuadrature(map421)
        val = dq.double_log_energy(n_phi_outer=128, n_s_outer=16)
        target = 0.5 * (br.C_const + cfg421.total * br.I_log - cfg421.Q1 * br.W_w)
        assert abs(val - target) < 1e-5 * max(1.0, abs(target))


@pytest.mark.slow
class TestOracleGrid:
    def test_closed_forms_on_grid(self):
        # 3x3x3 grid, all pre-critical; 1e-5 relative agreement
        for q0 in (1.0, 2.0, 4.0):
            for q1 in (0.5, 1.0, 2.0):
                for w in (0.6, 1.0, 2.0):
                    cfg = ChargeConfig(Q0=q0, Q1=q1, w=w)
                    m = build_map(cfg)
                    orc = energy_quadrature_oracle(m)
                    br = k_pre(cfg, m)
                    assert abs(orc.I_log - br.I_log) <= 1e-5 * max(1.0, abs(br.I_log))
                    assert abs(orc.W_zeta1 - br.W_zeta1) <= 1e-5 * max(1.0, abs(br.W_zeta1))
                    assert abs(orc.W_w - br.W_w) <= 1e-5 * max(1.0, abs(br.W_w))
