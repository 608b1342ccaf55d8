import math

import numpy as np
import pytest

from halfheat import (
    CircleFunction,
    HardyFunction,
    cauchy_transform,
    dirichlet_tail_norm,
    riesz_project,
    semigroup_apply,
    sobolev_norm,
    triangle_function,
)
from halfheat.fourier import (
    dirichlet_tail_report,
    triangle_coeff_exact,
    triangle_function_exact,
    triangle_profile,
    coefficients_piecewise_gauss,
)

THETA0 = math.pi / 4


class TestRieszProjection:
    def test_cosine(self):
        f = CircleFunction({1: 0.5, -1: 0.5}, 1)
        p = riesz_project(f)
        assert p.coeff(1) == pytest.approx(0.5)
        assert p.coeff(0) == 0
        assert p.coeff(-1) == 0

    def test_idempotent_on_hardy(self):
        h = HardyFunction({0: 1.0, 3: 2.0 - 1.0j}, 3)
        assert riesz_project(h) is h

    def test_triangle_modes_against_closed_form(self):
        # quadrature at 4096 samples vs the closed form (1-cos n theta0)/(pi n^2)
        tri = triangle_function(THETA0, 16, log2_samples=12)
        assert tri.coeff(2).real == pytest.approx(1.0 / (4.0 * math.pi), abs=1e-6)
        assert tri.coeff(0).real == pytest.approx(math.pi / 32.0, abs=1e-6)
        for n in range(1, 16):
            assert tri.coeff(n) == pytest.approx(
                triangle_coeff_exact(n, THETA0), abs=2e-6
            )

    def test_projection_decomposition_orthogonal(self, rng):
        coeffs = {
            int(n): complex(rng.standard_normal(), rng.standard_normal())
            for n in range(-8, 9)
        }
        f = CircleFunction(coeffs, 8)
        plus = riesz_project(f)
        minus = {n: c for n, c in f.coeffs.items() if n < 0}
        # <P+f, f - P+f> = 0: disjoint mode supports
        assert all(n not in minus for n in plus.coeffs)
        total = sum(abs(c) ** 2 for c in f.coeffs.values())
        assert plus.l2_norm() ** 2 + sum(abs(c) ** 2 for c in minus.values()) == pytest.approx(
            total
        )

    def test_conjugation_law(self, rng):
        coeffs = {
            int(n): complex(rng.standard_normal(), rng.standard_normal())
            for n in range(-6, 7)
        }
        f = CircleFunction(coeffs, 6)
        proj_conj = riesz_project(f.conjugate())
        for n in range(0, 7):
            assert proj_conj.coeff(n) == pytest.approx(np.conj(f.coeff(-n)))


class TestSemigroup:
    def test_single_mode(self):
        f = CircleFunction({3: 1.0}, 3)
        out = semigroup_apply(f, 1.0)
        assert out.coeff(3) == pytest.approx(math.exp(-3.0))

    def test_constant_invariant(self):
        f = CircleFunction({0: 2.5}, 0)
        assert semigroup_apply(f, 7.0).coeff(0) == pytest.approx(2.5)

    def test_two_sided_modes(self):
        f = CircleFunction({-2: 1.0, 5: 2.0}, 5)
        out = semigroup_apply(f, 0.5)
        assert out.coeff(-2) == pytest.approx(math.exp(-1.0))
        assert out.coeff(5) == pytest.approx(2.0 * math.exp(-2.5))

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            semigroup_apply(CircleFunction({0: 1.0}, 0), -0.1)

    def test_semigroup_law(self, rng):
        coeffs = {int(n): complex(rng.standard_normal()) for n in range(-5, 6)}
        f = CircleFunction(coeffs, 5)
        a = semigroup_apply(semigroup_apply(f, 0.3), 0.45)
        b = semigroup_apply(f, 0.75)
        for n in range(-5, 6):
            assert a.coeff(n) == pytest.approx(b.coeff(n), abs=1e-15)

    def test_contraction_in_sobolev_norms(self, rng):
        coeffs = {int(n): complex(rng.standard_normal()) for n in range(-7, 8)}
        f = CircleFunction(coeffs, 7)
        for s in (0.0, 0.5, 1.0, 2.0):
            for t in (0.0, 0.1, 1.0, 5.0):
                assert sobolev_norm(semigroup_apply(f, t), s) <= sobolev_norm(f, s) + 1e-14


class TestSobolevNorm:
    def test_single_mode(self):
        f = CircleFunction({1: 1.0}, 1)
        assert sobolev_norm(f, 1.0) == pytest.approx(math.sqrt(2.0))

    def test_zero(self):
        assert sobolev_norm(CircleFunction({}, 0), 0.5) == 0.0

    def test_parseval(self, rng):
        coeffs = {int(n): complex(rng.standard_normal(), rng.standard_normal())
                  for n in range(-9, 10)}
        f = CircleFunction(coeffs, 9)
        assert sobolev_norm(f, 0.0) == pytest.approx(f.l2_norm())

    def test_monotone_in_s(self):
        f = CircleFunction({-3: 1.0, 2: 0.5}, 3)
        values = [sobolev_norm(f, s) for s in (0.0, 0.25, 0.5, 1.0, 2.0)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_triangle_half_order_pinned(self):
        # oracle: closed-form coefficients summed to n = 10^6; tail beyond is
        # below 1e-12 in the squared sum, so the value is pinned to 1e-8
        n = np.arange(1, 1_000_000)
        c = (1.0 - np.cos(n * THETA0)) / (math.pi * n**2)
        total = triangle_coeff_exact(0, THETA0) ** 2 + 2.0 * np.sum(
            (1.0 + n**2) ** 0.5 * c**2
        )
        oracle = math.sqrt(total)
        assert oracle == pytest.approx(0.32639692072059034, abs=1e-10)  # frozen
        tri = triangle_function_exact(THETA0, 4096)
        assert sobolev_norm(tri, 0.5) == pytest.approx(oracle, abs=1e-7)


class TestDirichletTail:
    def test_single_negative_mode(self):
        g = CircleFunction({-2: 1.0}, 2)
        assert dirichlet_tail_norm(g) == pytest.approx(2.0)

    def test_hardy_has_zero_tail(self):
        h = HardyFunction({0: 1.0, 4: 2.0}, 4)
        assert dirichlet_tail_norm(h.as_circle_function()) == 0.0

    def test_harmonic_profile_flagged_divergent(self):
        coeffs = {-n: 1.0 / n for n in range(1, 65)}
        g = CircleFunction(coeffs, 64)
        h64 = sum(1.0 / n for n in range(1, 65))
        report = dirichlet_tail_report(g)
        assert report.weighted_sum == pytest.approx(h64, rel=1e-12)
        assert h64 == pytest.approx(4.7439, abs=5e-4)
        assert report.divergent_trend

    def test_fast_decay_not_flagged(self):
        coeffs = {-n: 1.0 / n**2 for n in range(1, 65)}
        report = dirichlet_tail_report(CircleFunction(coeffs, 64))
        assert not report.divergent_trend
        assert report.tail_estimate < 1e-3


class TestCauchyTransform:
    def test_inside_single_mode(self):
        g = CircleFunction({2: 1.0}, 2)
        assert cauchy_transform(g, 0.5) == pytest.approx(0.25)

    def test_outside_single_negative_mode(self):
        g = CircleFunction({-1: 1.0}, 1)
        assert cauchy_transform(g, 2.0) == pytest.approx(-0.5)

    def test_triangle_outside_value_pinned(self):
        tri = triangle_function_exact(THETA0, 2048)
        # oracle: direct summation of the closed-form negative modes
        n = np.arange(1, 2049)
        oracle = -np.sum(triangle_coeff_exact(-n, THETA0) * 2.0 ** (-n.astype(float)))
        assert cauchy_transform(tri, 2.0) == pytest.approx(oracle, abs=1e-12)
        assert abs(oracle) > 1e-3  # two-sided spectrum: the value is not zero

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            cauchy_transform(CircleFunction({0: 1.0}, 0), 1.0)

    def test_decay_at_infinity(self):
        g = CircleFunction({-1: 1.0, -2: 0.5}, 2)
        assert abs(cauchy_transform(g, 1e6)) < 1e-5


class TestTriangleFunction:
    def test_domain_validation(self):
        with pytest.raises(ValueError):
            triangle_function(0.0, 8)
        with pytest.raises(ValueError):
            triangle_function(math.pi, 8)

    def test_real_symmetry(self):
        tri = triangle_function(0.9, 32)
        assert tri.is_real_valued(tol=1e-12)

    def test_profile_support(self):
        t = np.linspace(-math.pi, math.pi, 1001)
        v = triangle_profile(t, THETA0)
        assert np.all(v[np.abs(t) > THETA0 + 1e-9] == 0.0)
        assert v[500] == pytest.approx(THETA0)  # apex at t = 0

    def test_piecewise_gauss_matches_closed_form(self):
        tri = coefficients_piecewise_gauss(
            lambda t: triangle_profile(t, THETA0),
            np.array([-THETA0, 0.0, THETA0]),
            64,
        )
        for n in range(-64, 65):
            assert tri.coeff(n) == pytest.approx(
                complex(triangle_coeff_exact(n, THETA0)), abs=2e-15
            )
