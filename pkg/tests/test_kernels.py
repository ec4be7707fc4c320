import math

import numpy as np
import pytest

from wallscale import (
    CrossSection,
    a_c,
    a_c_scaling_ratio,
    b_c,
    i_kernel,
    lemma32_bounds,
    verify_lemma32,
)

PI_HALF = math.pi / 2.0


def bracket(c: float) -> tuple[float, float]:
    ln_abs = abs(math.log(c))
    return (
        0.5 * c * ln_abs * (1.0 - 5.0 / math.sqrt(ln_abs)),
        0.5 * c * (3.0 - math.log(c)),
    )


def trapezoid_oracle_a1() -> float:
    """Dense composite-trapezoid evaluation of a_c at c=1 over [0, 1e4],
    Richardson-refined once; tail beyond 1e4 is below 2.5e-9."""

    def value(n: int) -> float:
        total = 0.0
        edges = np.linspace(0.0, 1e4, 11)
        for left, right in zip(edges[:-1], edges[1:]):
            t = np.linspace(left, right, n + 1)
            f = np.empty_like(t)
            nz = t > 0
            f[nz] = (np.sin(t[nz]) / t[nz]) ** 2 * (-np.expm1(-2.0 * t[nz]) / (2.0 * t[nz]))
            f[~nz] = 1.0
            total += np.trapezoid(f, t)
        return total

    coarse, fine = value(1_000_000), value(2_000_000)
    return fine + (fine - coarse) / 3.0


class TestAC:
    def test_reference_at_c1(self):
        oracle = trapezoid_oracle_a1()
        assert a_c(1.0) == pytest.approx(oracle, abs=1e-7)

    def test_large_c_approaches_pi_half_from_below(self):
        v = a_c(100.0)
        assert v < PI_HALF
        # deviation is ~1.9% of pi/2 at c=100 and shrinks with c
        assert PI_HALF - v <= 0.02 * PI_HALF
        assert PI_HALF - a_c(1000.0) < PI_HALF - v

    def test_tiny_c_lies_in_two_sided_bracket(self):
        for c in (1e-12, 1e-14):
            lo, hi = bracket(c)
            v = a_c(c)
            assert lo <= v <= hi, (c, lo, v, hi)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            a_c(-1.0)
        with pytest.raises(ValueError):
            a_c(0.0)

    def test_strictly_increasing_on_log_grid(self):
        grid = np.geomspace(1e-12, 1e3, 40)
        values = [a_c(float(c)) for c in grid]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(0.0 < v < PI_HALF for v in values)

    def test_complementarity_identity(self):
        # a_c + a_{1/c} = pi/2: summing the two zero-frequency kernels makes
        # (1/y^2 + 1/z^2)/(y^2+z^2) = 1/(y^2 z^2) and the double integral factorizes
        for c in (1.0, 3.7, 0.02):
            assert a_c(c) + a_c(1.0 / c) == pytest.approx(PI_HALF, abs=1e-7)


class TestBC:
    def test_identity_at_c1(self):
        assert b_c(1.0) == a_c(1.0)

    def test_reciprocal_small_c(self):
        assert b_c(0.01) == a_c(100.0)
        assert PI_HALF - b_c(0.01) <= 0.02 * PI_HALF

    def test_reciprocal_large_c(self):
        v = b_c(1e12)
        assert v == a_c(1e-12)
        lo, hi = bracket(1e-12)
        assert lo <= v <= hi


def oracle_i_2d(l: float, d: float, x: float, window: float, step: float = 0.5) -> float:
    """Dense tensor-grid trapezoid of the plane integral
    sin^2(d y) sin^2(l z) / (y^2 (x^2+y^2+z^2)) over [0, window]^2, times 4."""
    n = int(window / step) + 1
    y = np.linspace(0.0, window, n)
    z = np.linspace(0.0, window, n)
    fy = np.empty_like(y)
    fy[1:] = np.sin(d * y[1:]) ** 2 / y[1:] ** 2
    fy[0] = d * d
    fz = np.sin(l * z) ** 2
    wy = np.ones(n)
    wy[0] = wy[-1] = 0.5
    wz = wy
    total = 0.0
    chunk = 512
    for i0 in range(0, n, chunk):
        yy = y[i0 : i0 + chunk]
        denom = x * x + yy[:, None] ** 2 + z[None, :] ** 2
        block = (fy[i0 : i0 + chunk, None] * fz[None, :]) / denom
        total += float(np.einsum("i,ij,j->", wy[i0 : i0 + chunk], block, wz))
    h = y[1] - y[0]
    return 4.0 * total * h * h


class TestIKernel:
    CS = CrossSection(l=0.1, d=0.01)

    def test_zero_frequency_reductions(self):
        pref = 2.0 * math.pi * self.CS.l * self.CS.d
        assert i_kernel(self.CS, True, 0.0) == pref * a_c(self.CS.c)
        assert i_kernel(self.CS, False, 0.0) == pref * b_c(self.CS.c)

    def test_against_2d_tensor_oracle(self):
        # truncation error decays like 1/window; one window-Richardson stage
        # brings the plane-integral oracle to ~0.01 percent
        v2 = oracle_i_2d(0.1, 0.01, 5.0, 2000.0)
        v4 = oracle_i_2d(0.1, 0.01, 5.0, 4000.0)
        oracle = 2.0 * v4 - v2
        assert i_kernel(self.CS, True, 5.0) == pytest.approx(oracle, rel=0.01)

    def test_even_in_frequency(self):
        assert i_kernel(self.CS, True, 3.0) == i_kernel(self.CS, True, -3.0)
        assert i_kernel(self.CS, False, 7.0) == i_kernel(self.CS, False, -7.0)

    def test_nonincreasing_in_frequency(self):
        values = [i_kernel(self.CS, True, x) for x in (0.0, 1.0, 5.0, 20.0)]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert all(v > 0.0 for v in values)

    def test_m3_channel_never_cheaper(self):
        cs = CrossSection(l=0.1, d=0.05)
        for x in (0.0, 1.0, 5.0):
            assert i_kernel(cs, False, x) >= i_kernel(cs, True, x)


class TestLemma32Bounds:
    def test_degenerate_square_section(self):
        cs = CrossSection(l=1.0, d=1.0)
        b = lemma32_bounds(cs)
        assert b.upper_ii == pytest.approx(3.0 * math.pi)
        assert b.lower_iii == 0.0
        assert b.vacuous

    def test_extreme_ratio_positive_lower_bound(self):
        cs = CrossSection(l=0.1, d=1e-13)
        b = lemma32_bounds(cs)
        assert abs(math.log(cs.c)) > 25.0
        assert b.lower_iii > 0.0
        assert not b.vacuous
        assert b.lower_iii <= b.upper_i
        assert b.lower_iii <= b.upper_ii

    def test_moderate_ratio_vacuous_lower_bound(self):
        cs = CrossSection(l=0.1, d=0.01)
        b = lemma32_bounds(cs)
        assert b.lower_iii < 0.0
        assert b.vacuous
        assert b.upper_i > 0.0 and b.upper_ii > 0.0


class TestVerifyLemma32:
    def test_moderate_section_passes(self):
        cs = CrossSection(l=0.1, d=0.01)
        inv_l = 1.0 / cs.l
        report = verify_lemma32(cs, [0.0, 1.0, -1.0, inv_l, -inv_l])
        assert report.passed
        assert len(report.samples) == 5
        assert report.failures() == []

    def test_square_section_lower_bound_vacuous(self):
        cs = CrossSection(l=1.0, d=1.0)
        report = verify_lemma32(cs, [0.0, 0.4, 2.0])
        assert report.passed
        assert report.bounds.vacuous

    def test_extreme_section_lower_bound_active(self):
        cs = CrossSection(l=0.05, d=5e-13)
        report = verify_lemma32(cs, [0.0, 10.0, -10.0])
        assert not report.bounds.vacuous
        for s in report.samples:
            assert s.lower_margin is not None and s.lower_margin >= 0.0
        assert report.passed

    def test_empty_samples_rejected(self):
        with pytest.raises(ValueError):
            verify_lemma32(CrossSection(l=1.0, d=0.5), [])


class TestScalingRatio:
    def test_deviation_from_half_decreases(self):
        ratios = [a_c_scaling_ratio(c) for c in (1e-4, 1e-8, 1e-12)]
        devs = [abs(r - 0.5) for r in ratios]
        assert devs[0] > devs[1] > devs[2]

    def test_transported_bounds_at_1e12(self):
        r = a_c_scaling_ratio(1e-12)
        ln_abs = abs(math.log(1e-12))
        assert r <= (3.0 + ln_abs) / (2.0 * ln_abs)
        assert r >= 0.5 * (1.0 - 5.0 / math.sqrt(ln_abs))

    def test_domain(self):
        with pytest.raises(ValueError):
            a_c_scaling_ratio(1.5)


class TestCrossSection:
    def test_aspect_ratio_consistency(self):
        cs = CrossSection(l=0.3, d=0.12)
        assert cs.c == cs.d / cs.l

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            CrossSection(l=0.1, d=0.2)
        with pytest.raises(ValueError):
            CrossSection(l=0.1, d=0.0)
