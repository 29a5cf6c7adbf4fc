import math

import numpy as np
import pytest

from spheregas.duality import (
    Method,
    duality_check_smallN,
    gap_rewrite_check,
    jue_moment,
    srue_moment,
)
from spheregas.jue import jue_gap_quadrature


class TestDuality:
    def test_empty_product(self):
        rep = duality_check_smallN(2, 0, 3, 0.7)
        assert rep.lhs == rep.rhs == 1.0 and rep.rel_err == 0.0

    @pytest.mark.parametrize("N,r,K", [(1, 1, 2), (2, 1, 2), (2, 2, 3)])
    @pytest.mark.parametrize("w", [0.3, 0.7, 1.5])
    def test_desk_scale_quadrature(self, N, r, K, w):
        rep = duality_check_smallN(N, r, K, w)
        assert rep.method is Method.QUADRATURE
        assert rep.rel_err < 1e-12

    def test_w_zero_one_dimensional(self):
        # both sides collapse to 1D integrals evaluated by separate rules
        rep = duality_check_smallN(1, 1, 2, 0.0)
        # closed form of the spherical side: <|z|^2> = <t> = B(2,3)/B(1,4)
        assert abs(rep.lhs - 1.0 / 3.0) < 1e-12
        assert rep.rel_err < 1e-8

    def test_exact_first_moment(self):
        # N=1, r=1: <|w-z|^2> = w^2 + <t> with <t> = 1/3 at K=2
        for w in (0.3, 1.5):
            assert abs(srue_moment(1, 1, 2, w) - (w**2 + 1.0 / 3.0)) < 1e-12
            assert abs(jue_moment(1, 1, 2, w) - (w**2 + 1.0 / 3.0)) < 1e-13

    def test_requires_moment_condition(self):
        with pytest.raises(ValueError):
            duality_check_smallN(2, 3, 1, 0.5)

    def test_monte_carlo_fallback(self):
        rep = duality_check_smallN(10, 1, 2, 0.7, method=Method.MONTE_CARLO,
                                   sweeps=30000, seed=4)
        assert rep.method is Method.MONTE_CARLO
        assert abs(rep.lhs - rep.rhs) < 3.0 * rep.error_estimate * abs(rep.rhs)


class TestGapRewrite:
    @pytest.mark.parametrize("N,r,K,w", [(2, 1, 2, 1.0), (1, 1, 2, 0.7), (2, 2, 3, 1.5)])
    def test_chain_equality(self, N, r, K, w):
        rep = gap_rewrite_check(N, r, K, w)
        assert rep.rel_err < 1e-8

    def test_small_w_gap_is_full(self):
        # w -> 0: the excluded interval (1/(1+w^2), 1) vanishes and E -> 1
        val = jue_gap_quadrature(1, 1.0, 2.0, 1.0 / (1.0 + 1e-8))
        assert val > 1 - 1e-7

    def test_large_w_prefactor_dominates(self):
        rep = gap_rewrite_check(2, 1, 2, 6.0)
        assert rep.rel_err < 1e-8
        # the gap factor itself is tiny while the product matches
        gap = jue_gap_quadrature(1, 1, 2, 1.0 / 37.0)
        assert gap < 0.01
