import math

import numpy as np
import pytest

from halfheat import (
    AnnularSector,
    ArcInterval,
    EXTERIOR,
    INTERIOR,
    annulus_monomial_norm,
    bergman_gram,
    exterior_bergman_kernel,
    friedrichs_bilinear,
    hardy_kernel,
)
from halfheat.sectors import OrthonormalBasis
from halfheat.observability import gram_route_constant, _pairings_from_density
from halfheat.fourier import HardyFunction, triangle_profile, TWO_PI


def quad_inner(sector, m, n, n_r=100, n_t=140):
    """2-D tensor-quadrature oracle for <z^m, z^n> on the sector."""
    z, w = sector.quadrature(n_r, n_t)
    return np.sum(w * z**m * np.conj(z) ** n)


class TestSectorGeometry:
    def test_area_closed_form(self, ext_quarter_ln2, int_quarter_ln2):
        # exterior: (arc length) (e^{2T} - 1)/2 with T = ln 2
        assert ext_quarter_ln2.area() == pytest.approx((math.pi / 2) * 3.0 / 2.0)
        assert int_quarter_ln2.area() == pytest.approx((math.pi / 2) * (1 - 0.25) / 2.0)

    def test_area_vs_quadrature(self, ext_quarter_ln2):
        z, w = ext_quarter_ln2.quadrature(60, 80)
        assert np.sum(w) == pytest.approx(ext_quarter_ln2.area(), rel=1e-12)

    def test_validation(self, quarter_arc):
        with pytest.raises(ValueError):
            AnnularSector("nowhere", 1.0, quarter_arc)
        with pytest.raises(ValueError):
            AnnularSector(EXTERIOR, 0.0, quarter_arc)
        with pytest.raises(ValueError):
            ArcInterval(0.0, TWO_PI)  # full circle is not a strict arc


class TestBergmanGram:
    def test_exterior_corner_value(self, ext_quarter_ln2):
        gram = bergman_gram(ext_quarter_ln2, 2)
        assert gram.entries[0, 0] == pytest.approx(3.0 * math.pi / 4.0, rel=1e-14)

    def test_interior_corner_value(self, int_quarter_ln2):
        gram = bergman_gram(int_quarter_ln2, 2)
        assert gram.entries[0, 0] == pytest.approx(3.0 * math.pi / 16.0, rel=1e-14)

    def test_off_diagonal_value_and_hermitian(self, ext_quarter_ln2):
        gram = bergman_gram(ext_quarter_ln2, 2)
        assert gram.entries[0, 1] == pytest.approx((7.0 / 3.0) * (1.0 - 1.0j), rel=1e-13)
        assert gram.entries[1, 0] == pytest.approx(np.conj(gram.entries[0, 1]), rel=1e-13)

    @pytest.mark.parametrize("side", [EXTERIOR, INTERIOR])
    def test_closed_form_matches_quadrature(self, side, quarter_arc):
        # relative error scaled by sqrt(G[m,m] G[n,n]), the natural entry
        # magnitude (several entries vanish exactly by arc symmetry)
        sector = AnnularSector(side, math.log(2.0), quarter_arc)
        gram = bergman_gram(sector, 20)
        diag = np.real(np.diag(gram.entries))
        for m in range(0, 21, 5):
            for n in range(0, 21, 4):
                oracle = quad_inner(sector, m, n)
                scale = math.sqrt(diag[m] * diag[n])
                assert abs(gram.entries[m, n] - oracle) <= 1e-10 * scale

    def test_separability(self, ext_quarter_ln2):
        gram = bergman_gram(ext_quarter_ln2, 12)
        sec = ext_quarter_ln2
        for m in (0, 3, 11):
            for n in (1, 7, 12):
                rebuilt = sec.radial_moment(m + n) * sec.angular_moment(m - n)
                assert gram.entries[m, n] == pytest.approx(rebuilt, rel=1e-14)

    def test_rescaled_cholesky_small_order(self, ext_quarter_ln2):
        gram = bergman_gram(ext_quarter_ln2, 8)
        L = gram.cholesky
        rec = L @ L.conj().T
        assert np.allclose(rec, gram.rescaled, atol=1e-12)
        assert gram.condition_estimate > 1.0


class TestFriedrichsBilinear:
    def test_disk_vanishes_off_corner(self):
        mat = friedrichs_bilinear(None, 6)
        assert mat.entries[0, 0] == pytest.approx(math.pi)
        off = mat.entries.copy()
        off[0, 0] = 0.0
        assert np.max(np.abs(off)) == 0.0

    def test_ring_entry_vs_quadrature(self, int_quarter_ln2):
        mat = friedrichs_bilinear(int_quarter_ln2, 4)
        z, w = int_quarter_ln2.quadrature(80, 120)
        oracle = np.sum(w * z * z)
        assert mat.entries[1, 1] == pytest.approx(oracle, rel=1e-12)
        # closed form: R(2) * int e^{2 i theta} = (15/64) * i
        assert mat.entries[1, 1] == pytest.approx(15j / 64.0, rel=1e-13)

    def test_symmetric(self, int_quarter_ln2):
        mat = friedrichs_bilinear(int_quarter_ln2, 10)
        assert np.max(np.abs(mat.entries - mat.entries.T)) == 0.0


class TestHardyKernel:
    def test_center_is_constant(self):
        k = hardy_kernel(0.0, 8)
        assert k.coeff(0) == 1.0
        assert all(k.coeff(n) == 0 for n in range(1, 9))

    def test_reproduces_polynomials(self):
        k = hardy_kernel(0.5, 8)
        f = HardyFunction({2: 1.0}, 2)
        inner = sum(f.coeff(n) * np.conj(k.coeff(n)) for n in range(9))
        assert inner == pytest.approx(0.25)

    def test_coefficient_formula(self):
        u = 0.8 * np.exp(1j * math.pi / 4)
        k = hardy_kernel(u, 64)
        assert k.coeff(2) == pytest.approx(np.conj(u) ** 2)
        assert k.coeff(2) == pytest.approx(-0.64j, abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            hardy_kernel(1.0, 4)


class TestExteriorBergmanKernel:
    def test_point_value(self):
        assert exterior_bergman_kernel(2.0, 2.0) == pytest.approx(1.0 / (9.0 * math.pi))

    def test_decay(self):
        assert abs(exterior_bergman_kernel(1e8, 2.0)) < 1e-14

    def test_hermitian_symmetry(self):
        u, z = 2.0 + 1.0j, 1.5 - 0.5j
        assert exterior_bergman_kernel(u, z) == pytest.approx(
            np.conj(exterior_bergman_kernel(z, u))
        )

    def test_domain(self):
        with pytest.raises(ValueError):
            exterior_bergman_kernel(0.5, 2.0)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_reproducing_on_exterior_monomials(self, k):
        # <z^-k, K_u>_{A2(exterior)} = u^-k; quadrature on 1 < |z| < R with a
        # tail that decays like R^{-k} * R^{-1}
        u = 2.0 + 0.5j
        R = 400.0
        xr, wr = np.polynomial.legendre.leggauss(400)
        r = 0.5 * (R - 1.0) * xr + 0.5 * (R + 1.0)
        wr = wr * 0.5 * (R - 1.0) * r
        nt = 256
        t = np.arange(nt) * TWO_PI / nt
        wt = TWO_PI / nt
        z = r[:, None] * np.exp(1j * t[None, :])
        vals = z ** (-k) * np.conj(1.0 / (math.pi * (1.0 - np.conj(u) * z) ** 2))
        integral = np.sum(vals * wr[:, None] * wt)
        assert integral == pytest.approx(u ** (-k), rel=1e-4)


class TestAnnulusMonomialNorm:
    def test_base_value_vs_quadrature(self):
        val = annulus_monomial_norm(1.0, 0)
        assert val == pytest.approx(2.0 * math.pi * (math.e - 1.0) / 2.0, rel=1e-14)
        xr, wr = np.polynomial.legendre.leggauss(200)
        r = 0.5 * (math.exp(0.5) - 1.0) * xr + 0.5 * (math.exp(0.5) + 1.0)
        wr = wr * 0.5 * (math.exp(0.5) - 1.0)
        oracle = TWO_PI * np.sum(wr * r)
        assert val == pytest.approx(oracle, rel=1e-12)

    def test_per_term_inequality(self):
        for T in (0.05, 0.3, 1.0, 4.0):
            for n in range(0, 40, 3):
                assert annulus_monomial_norm(T, n) >= math.pi * T

    def test_small_horizon_limit(self):
        for T in (1e-3, 1e-5):
            assert annulus_monomial_norm(T, 0) / T == pytest.approx(math.pi, rel=50 * T)


class TestOrthonormalBasis:
    def test_orthonormality(self, ext_quarter_ln2):
        basis = OrthonormalBasis(ext_quarter_ln2, 24)
        assert basis.orthonormality_defect() < 1e-12

    def test_matches_gram_route(self, quarter_arc):
        # same constant through the monomial Gram factorization (valid at
        # small order) and through the orthonormal-basis pairing
        sector = AnnularSector(EXTERIOR, 1.0, quarter_arc)
        basis = OrthonormalBasis(sector, 10)
        u = 0.5
        f0 = hardy_kernel(u, 10)
        via_gram = gram_route_constant(f0, sector, 10)
        P = basis.evaluate(np.array([u]))[0]
        via_basis = float(np.sqrt(np.sum(np.abs(P) ** 2)))
        # the Gram route loses ~cond(G)*eps ~ 1e-6 at this order; the basis
        # route is the accurate one
        assert via_basis == pytest.approx(via_gram, rel=1e-5)

    def test_density_pairing_matches_gram_route(self, centered_arc):
        sector = AnnularSector(EXTERIOR, 1.0, centered_arc)
        basis = OrthonormalBasis(sector, 10)
        th0 = math.pi / 4
        support = ArcInterval(-th0, th0)
        ell = _pairings_from_density(basis, lambda t: triangle_profile(t, th0), support)
        via_basis = float(np.sqrt(np.sum(np.abs(ell) ** 2)))
        from halfheat.fourier import triangle_function_exact, riesz_project

        f0 = riesz_project(triangle_function_exact(th0, 10))
        via_gram = gram_route_constant(f0, sector, 10)
        assert via_basis == pytest.approx(via_gram, rel=1e-5)

    def test_evaluation_is_polynomial(self, ext_quarter_ln2):
        basis = OrthonormalBasis(ext_quarter_ln2, 6)
        # p_k at the quadrature nodes equals the recurrence evaluation there
        direct = basis.evaluate(basis.nodes[:50])
        assert np.allclose(direct, basis.node_values[:50], atol=1e-10)
