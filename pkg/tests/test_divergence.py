import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weibull_kl.divergence import (
    KernelConfig,
    KlBreakdown,
    kernel_matrix,
    kl_breakdown,
    kl_exponential,
    kl_kernel,
    kl_weibull,
    symmetric_kl,
)
from weibull_kl.special_functions import EULER_GAMMA
from weibull_kl.weibull import WeibullParams as W

from .conftest import grid_params

log_shapes = st.floats(min_value=math.log(0.2), max_value=math.log(20.0)).map(math.exp)
log_scales = st.floats(min_value=math.log(0.1), max_value=math.log(100.0)).map(math.exp)
params = st.builds(W, log_shapes, log_scales)


def mp_kl(p, q, dps=30):
    """KL(p || q) by direct high-precision integration of f_p log(f_p / f_q)."""
    with mpmath.workdps(dps):
        k1, l1, k2, l2 = map(mpmath.mpf, (p.shape, p.scale, q.shape, q.scale))

        def logf(x, k, l):
            return mpmath.log(k / l) + (k - 1) * mpmath.log(x / l) - (x / l) ** k

        def integrand(x):
            return mpmath.exp(logf(x, k1, l1)) * (logf(x, k1, l1) - logf(x, k2, l2))

        return float(mpmath.quad(integrand, [0, l1 / 4, l1, 4 * l1, mpmath.inf]))


EXP_12 = math.log(2) - 0.5
EXP_21 = 1 - math.log(2)
WEIB_21_11 = math.log(2) - EULER_GAMMA / 2 + math.sqrt(math.pi) / 2 - 1


class TestKl:
    def test_self(self):
        assert kl_weibull(W(2, 3), W(2, 3)) == 0.0

    @pytest.mark.parametrize(
        "p, q, expected",
        [
            (W(1, 1), W(1, 2), EXP_12),
            (W(2, 1), W(1, 1), WEIB_21_11),
        ],
    )
    def test_examples(self, p, q, expected):
        assert kl_weibull(p, q) == pytest.approx(expected, abs=1e-15)
        assert kl_weibull(p, q) == pytest.approx(mp_kl(p, q), abs=1e-12)

    def test_rounded_example_values(self):
        assert round(kl_weibull(W(1, 1), W(1, 2)), 8) == 0.19314718
        assert round(kl_weibull(W(2, 1), W(1, 1)), 8) == 0.29076627

    def test_asymmetry(self):
        forward = kl_weibull(W(2, 1), W(1, 1))
        backward = kl_weibull(W(1, 1), W(2, 1))
        assert backward == pytest.approx(mp_kl(W(1, 1), W(2, 1)), abs=1e-12)
        assert abs(forward - backward) > 0.5

    @pytest.mark.parametrize(
        "p, q",
        [(W(0.5, 1), W(5, 10)), (W(3.5, 2), W(2, 1)), (W(5, 0.5), W(0.5, 10)), (W(0.7, 3), W(1.3, 2.5))],
    )
    def test_against_high_precision_integral(self, p, q):
        expected = mp_kl(p, q)
        assert abs(kl_weibull(p, q) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_extreme_ratios_use_log_space(self):
        # Gamma(201) alone overflows a double; the product with (1/3)**300 does not
        b = kl_breakdown(W(1.5, 1), W(300, 3))
        assert b.cross_gamma_term == pytest.approx(
            math.exp(300 * math.log(1 / 3) + math.lgamma(201)), rel=1e-12
        )
        b = kl_breakdown(W(2, 1), W(300, 1.5))
        assert b.cross_gamma_term == pytest.approx(
            math.exp(300 * math.log(1 / 1.5) + math.lgamma(151)), rel=1e-12
        )

    def test_overflow_reports_magnitude(self):
        with pytest.raises(OverflowError, match="exp"):
            kl_weibull(W(1, 100), W(400, 1))

    @settings(max_examples=1000, deadline=None)
    @given(params, params)
    def test_gibbs(self, p, q):
        assert kl_weibull(p, q) >= -1e-10

    @pytest.mark.parametrize("p", grid_params(), ids=str)
    def test_self_grid(self, p):
        assert abs(kl_weibull(p, p)) <= 1e-12
        # a copy is equal but not the same object
        assert kl_weibull(p, W(p.shape, p.scale)) == 0.0

    @pytest.mark.parametrize("c", [0.1, 3.0, 100.0])
    def test_scale_invariance(self, c, pairs):
        for p, q in pairs:
            a = kl_weibull(p, q)
            b = kl_weibull(W(p.shape, c * p.scale), W(q.shape, c * q.scale))
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a)), (p, q)


class TestBreakdown:
    def test_self(self):
        assert kl_breakdown(W(2, 3), W(2, 3)) == KlBreakdown(0.0, 0.0, 1.0, -1.0, 0.0)

    def test_log_moment_example(self):
        b = kl_breakdown(W(2, 1), W(1, 1))
        assert b.log_moment_term == pytest.approx(-EULER_GAMMA / 2, abs=1e-16)
        assert b.log_moment_term == pytest.approx(-0.28860783, abs=1e-8)

    def test_cross_gamma_example(self):
        assert kl_breakdown(W(1, 1), W(1, 2)).cross_gamma_term == pytest.approx(0.5, abs=1e-15)

    def test_components_are_expectations(self):
        """Each component equals E_p of the matching piece of the log-ratio."""
        p, q = W(1.7, 2.2), W(0.8, 3.1)
        k1, l1, k2, l2 = p.shape, p.scale, q.shape, q.scale
        b = kl_breakdown(p, q)

        def expect(h):
            def integrand(x):
                return (k1 / l1) * (x / l1) ** (k1 - 1) * mpmath.exp(-((x / l1) ** k1)) * h(x)
            return float(mpmath.quad(integrand, [0, l1, mpmath.inf]))

        a_plus_d = math.log(k1 / l1) - math.log(k2 / l2) + (k2 - 1) * math.log(l2) - (k1 - 1) * math.log(l1)
        assert b.const_terms == pytest.approx(a_plus_d, abs=1e-13)
        assert b.log_moment_term == pytest.approx(expect(lambda x: (k1 - k2) * mpmath.log(x)), abs=1e-12)
        assert b.cross_gamma_term == pytest.approx(expect(lambda x: (x / l2) ** k2), abs=1e-12)
        assert b.self_term == pytest.approx(-expect(lambda x: (x / l1) ** k1), abs=1e-12)

    @settings(max_examples=1000, deadline=None)
    @given(params, params)
    def test_total_consistency(self, p, q):
        b = kl_breakdown(p, q)
        assert b.self_term == -1.0
        assert abs(b.const_terms + b.log_moment_term + b.cross_gamma_term + b.self_term - b.total) <= 1e-12
        assert b.total == kl_weibull(p, q)


class TestExponential:
    @pytest.mark.parametrize("s1, s2, expected", [(1, 1, 0.0), (1, 2, EXP_12), (2, 1, EXP_21)])
    def test_examples(self, s1, s2, expected):
        assert kl_exponential(s1, s2) == pytest.approx(expected, abs=1e-15)

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            kl_exponential(0.0, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(log_scales, log_scales)
    def test_reduction(self, l1, l2):
        assert abs(kl_weibull(W(1, l1), W(1, l2)) - kl_exponential(l1, l2)) <= 1e-12


class TestSymmetricAndKernel:
    def test_symmetric_examples(self):
        assert symmetric_kl(W(3, 2), W(3, 2)) == 0.0
        assert symmetric_kl(W(1, 1), W(1, 2)) == pytest.approx(0.25, abs=1e-15)

    @settings(max_examples=300, deadline=None)
    @given(params, params)
    def test_symmetric_exact(self, p, q):
        assert symmetric_kl(p, q) == symmetric_kl(q, p)

    def test_kernel_examples(self):
        assert kl_kernel(W(2, 2), W(2, 2), KernelConfig(7.5)) == 1.0
        assert kl_kernel(W(1, 1), W(1, 2)) == pytest.approx(math.exp(-0.25), abs=1e-15)
        assert kl_kernel(W(1, 1), W(1, 2), KernelConfig(2.0)) == pytest.approx(math.exp(-0.5), abs=1e-15)

    @pytest.mark.parametrize("scale", [0.0, -1.0, math.inf, math.nan])
    def test_kernel_config_validation(self, scale):
        with pytest.raises(ValueError):
            KernelConfig(scale)

    def test_kernel_decreasing_in_divergence(self):
        p = W(2, 1)
        qs = [W(2, s) for s in (1.1, 1.5, 2.0, 4.0)]
        div = [symmetric_kl(p, q) for q in qs]
        ker = [kl_kernel(p, q) for q in qs]
        assert div == sorted(div)
        assert ker == sorted(ker, reverse=True)
        assert all(0 < v < 1 for v in ker)

    def test_matrix_examples(self):
        assert kernel_matrix([W(1, 1)]).tolist() == [[1.0]]
        assert kernel_matrix([W(1, 1), W(1, 1)]).tolist() == [[1.0, 1.0], [1.0, 1.0]]
        m = kernel_matrix([W(1, 1), W(1, 2)], KernelConfig(1.0))
        assert m[0, 1] == pytest.approx(0.77880078, abs=1e-8)

    def test_matrix_empty(self):
        with pytest.raises(ValueError):
            kernel_matrix([])

    def test_matrix_structure(self):
        models = grid_params()
        m = kernel_matrix(models, KernelConfig(0.3))
        assert np.array_equal(m, m.T)
        assert np.all(np.diag(m) == 1.0)
        # far-apart grid models underflow exp(-a * divergence) to 0.0
        assert np.all((m >= 0) & (m <= 1))
        moderate = kernel_matrix([W(k, l) for k in (0.8, 1.0, 1.5) for l in (1.0, 2.0)])
        assert np.all((moderate > 0) & (moderate <= 1))
        i, j = 3, 11
        assert m[i, j] == kl_kernel(models[i], models[j], KernelConfig(0.3))
        rev = kernel_matrix(models[::-1], KernelConfig(0.3))
        assert np.array_equal(rev[::-1, ::-1], m)
