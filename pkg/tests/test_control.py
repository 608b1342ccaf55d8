import math

import numpy as np
import pytest

from halfheat import (
    ArcInterval,
    CircleFunction,
    hardy_kernel,
    hum_gramian,
    mean_matching_check,
    simulate,
    synthesize_h2,
    synthesize_l2,
)
from halfheat.control import (
    ControlField,
    arc_average,
    decompose_zero_mean,
    interval_weights,
    minimality_gaps,
    _DiscreteSystem,
)
from halfheat.fourier import HardyFunction, bump_profile, coefficients_by_quadrature, riesz_project

T = 1.0
ARC = ArcInterval(0.0, math.pi / 2)
ORDER = 32
EPS = [10.0 ** (-k) for k in range(2, 11)]


@pytest.fixture(scope="module")
def bump_state():
    prof = lambda t: bump_profile(t, math.pi / 4, math.pi / 5)  # noqa: E731
    return coefficients_by_quadrature(prof, ORDER, 14)


class TestHumGramian:
    def test_zero_zero_entry(self):
        lam = hum_gramian(T, ARC, range(0, 3))
        assert lam.entries[0, 0] == pytest.approx(T * (math.pi / 2) / (2 * math.pi))
        assert lam.entries[0, 0] == pytest.approx(0.25)

    def test_one_one_entry(self):
        lam = hum_gramian(T, ARC, range(0, 3))
        expected = ((1.0 - math.exp(-2.0)) / 2.0) * 0.25
        assert lam.entries[1, 1] == pytest.approx(expected, rel=1e-14)

    def test_hermitian(self):
        lam = hum_gramian(T, ARC, range(-4, 5))
        assert np.allclose(lam.entries, lam.entries.conj().T, atol=1e-15)

    def test_entries_match_time_quadrature(self):
        # oracle: trapezoid in time of e^{-(T-t)(|m|+|n|)} times the arc factor
        lam = hum_gramian(T, ARC, range(-16, 17))
        modes = np.arange(-16, 17)
        ts = np.linspace(0.0, T, 20001)
        for m, n in [(0, 0), (3, -5), (16, 16), (-16, 7), (1, 0)]:
            i, j = m + 16, n + 16
            profile = np.exp(-(T - ts) * (abs(m) + abs(n)))
            rho = np.trapezoid(profile, ts)
            oracle = rho * arc_average(ARC, m - n)
            assert lam.entries[i, j] == pytest.approx(oracle, rel=1e-8, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            hum_gramian(0.0, ARC, range(3))


class TestSynthesisH2:
    def test_zero_state(self):
        u, rep = synthesize_h2(HardyFunction({}, 4), T, ARC, 4, [1e-4])
        assert rep.terminal_residual == 0.0
        assert u.norm() == pytest.approx(0.0, abs=1e-14)

    def test_bump_reaches_target_with_bounded_norm(self, bump_state):
        f0 = riesz_project(bump_state)
        u, rep = synthesize_h2(f0, T, ARC, ORDER, EPS)
        assert rep.terminal_residual <= 1e-3
        ok = [s for s in rep.sweep if s["residual"] <= 1e-3]
        assert ok and max(s["norm"] for s in ok) < 10.0 * f0.l2_norm() / f0.l2_norm() * 1.0

    def test_sweep_monotone_tradeoff(self, bump_state):
        f0 = riesz_project(bump_state)
        _, rep = synthesize_h2(f0, T, ARC, ORDER, EPS)
        eps = [s["epsilon"] for s in rep.sweep]
        assert eps == sorted(eps, reverse=True)
        residuals = [s["residual"] for s in rep.sweep]
        norms = [s["norm"] for s in rep.sweep]
        assert all(b <= a + 1e-12 for a, b in zip(residuals, residuals[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_analytic_state_needs_much_larger_norm(self, bump_state):
        f0 = riesz_project(bump_state)
        _, rep_bump = synthesize_h2(f0, T, ARC, ORDER, EPS)
        bump_norm = max(s["norm"] for s in rep_bump.sweep if s["residual"] <= 1e-3)
        k05 = hardy_kernel(0.5, ORDER)
        _, rep_k = synthesize_h2(k05, T, ARC, ORDER, EPS)
        good = [s for s in rep_k.sweep if s["residual"] <= 1e-2]
        assert all(s["norm"] >= 10.0 * bump_norm for s in good)

    def test_simulation_reproduces_reported_residual(self, bump_state):
        f0 = riesz_project(bump_state)
        u, rep = synthesize_h2(f0, T, ARC, ORDER, [1e-6])
        traj = simulate(f0.as_circle_function(), u)
        final = traj[-1]
        resid = final.l2_norm() / f0.l2_norm()
        assert resid == pytest.approx(rep.terminal_residual, abs=1e-10)


class TestSynthesisL2:
    def test_bump_target_and_mean_identity(self, bump_state):
        u, rep = synthesize_l2(bump_state, T, ARC, ORDER, EPS)
        assert rep.terminal_residual <= 1e-3
        assert rep.mean_matching_residual <= 1e-8

    def test_analytic_state_stalls(self, bump_state):
        f0 = CircleFunction({3: 1.0, -3: 1.0}, 3)
        _, rep = synthesize_l2(f0, T, ARC, ORDER, [1e-2, 1e-4, 1e-6])
        _, rep_bump = synthesize_l2(bump_state, T, ARC, ORDER, EPS)
        bump_norm = max(s["norm"] for s in rep_bump.sweep if s["residual"] <= 1e-3)
        good = [s for s in rep.sweep if s["residual"] <= 1e-2]
        assert all(s["norm"] >= 10.0 * bump_norm for s in good)

    def test_frequency_split_controlled_together(self, bump_state):
        # after a successful L2 steering both P+ f(T) and P+ conj(f(T)) vanish
        u, rep = synthesize_l2(bump_state, T, ARC, ORDER, [1e-8])
        traj = simulate(bump_state, u)
        final = traj[-1]
        plus = math.sqrt(sum(abs(c) ** 2 for n, c in final.coeffs.items() if n >= 0))
        minus = math.sqrt(sum(abs(c) ** 2 for n, c in final.coeffs.items() if n <= 0))
        scale = bump_state.l2_norm()
        assert plus / scale <= 2.0 * rep.terminal_residual
        assert minus / scale <= 2.0 * rep.terminal_residual

    def test_mode_zero_only_state(self):
        f0 = CircleFunction({0: 0.3}, 0)
        u, rep = synthesize_l2(f0, T, ARC, 0, [1e-10])
        assert rep.terminal_residual <= 1e-6
        assert mean_matching_check(u, f0) <= 1e-8


class TestSimulate:
    def test_free_evolution(self):
        f0 = CircleFunction({-2: 1.0, 3: 0.5}, 3)
        u = ControlField(np.arange(-3, 4), np.zeros((7, 16), dtype=complex), T, ARC)
        traj = simulate(f0, u)
        final = traj[-1]
        assert final.coeff(-2) == pytest.approx(math.exp(-2.0 * T), rel=1e-12)
        assert final.coeff(3) == pytest.approx(0.5 * math.exp(-3.0 * T), rel=1e-12)

    def test_mode_zero_integrates_forcing(self):
        f0 = CircleFunction({0: 0.7}, 0)
        vals = np.full((1, 8), 2.0, dtype=complex)
        u = ControlField(np.array([0]), vals, T, ARC)
        traj = simulate(f0, u)
        forcing_mode0 = u.restricted_mode(0, 0)
        assert traj[-1].coeff(0) == pytest.approx(0.7 + T * forcing_mode0, rel=1e-12)

    def test_refinement_changes_little(self, bump_state):
        f0 = riesz_project(bump_state).as_circle_function()
        u, _ = synthesize_h2(riesz_project(bump_state), T, ARC, 16, [1e-6], steps=1024)
        r1 = simulate(f0, u)[-1].l2_norm()
        r2 = simulate(f0, u, steps=2048)[-1].l2_norm()
        assert abs(r1 - r2) < 1e-6

    def test_grid_mismatch_rejected(self):
        u = ControlField(np.array([0]), np.ones((1, 7), dtype=complex), T, ARC)
        with pytest.raises(ValueError):
            simulate(CircleFunction({0: 1.0}, 0), u, steps=15)


class TestMeanMatching:
    def test_zero_control_zero_mean_state(self):
        u = ControlField(np.array([0]), np.zeros((1, 4), dtype=complex), T, ARC)
        f0 = CircleFunction({1: 1.0}, 1)  # fhat(0) = 0
        assert mean_matching_check(u, f0) == 0.0

    def test_h2_syntheses_of_conjugate_pair_share_mean(self, bump_state):
        # the two controls of the split system have equal space-time means
        # when fhat0(0) is real
        f_plus = riesz_project(bump_state)
        f_minus = riesz_project(bump_state.conjugate())
        u_p, _ = synthesize_h2(f_plus, T, ARC, ORDER, [1e-8])
        u_m, _ = synthesize_h2(f_minus, T, ARC, ORDER, [1e-8])
        mean_p = u_p.space_time_mean()
        mean_m = u_m.space_time_mean()
        assert bump_state.coeff(0).imag == pytest.approx(0.0, abs=1e-12)
        assert mean_p == pytest.approx(-f_plus.coeff(0), abs=5e-8)
        assert mean_m == pytest.approx(np.conj(mean_p), abs=1e-7)


class TestMinimality:
    def test_norm_never_decreases_under_kernel_perturbations(self, bump_state):
        f0 = riesz_project(bump_state)
        u, _ = synthesize_h2(f0, T, ARC, 16, [1e-6], steps=256)
        gaps = minimality_gaps(u, np.arange(0, 17), n_trials=50, seed=7, scale=0.1)
        assert np.min(gaps) >= -1e-10


class TestDecomposeZeroMean:
    def _smooth_zero_mean_field(self, seed=0, band=48, steps=12):
        rng = np.random.default_rng(seed)
        modes = np.arange(-band, band + 1)
        decay = np.exp(-0.35 * np.abs(modes))
        vals = (
            rng.standard_normal((len(modes), steps))
            + 1j * rng.standard_normal((len(modes), steps))
        ) * decay[:, None]
        v = ControlField(modes, vals, T, ARC)
        mean = v.space_time_mean()
        dt = T / steps
        phi = np.repeat(dt * arc_average(ARC, modes)[:, None], steps, axis=1)
        vals = vals - (mean / float(np.sum(np.abs(phi) ** 2))) * np.conj(phi)
        return ControlField(modes, vals, T, ARC)

    def test_zero_field(self):
        v = ControlField(np.arange(-8, 9), np.zeros((17, 8), dtype=complex), T, ARC)
        v1, v2, r = decompose_zero_mean(v, 4)
        assert v1.norm() == pytest.approx(0.0, abs=1e-14)
        assert v2.norm() == pytest.approx(0.0, abs=1e-14)
        assert r == pytest.approx(0.0, abs=1e-12)

    def test_nonzero_mean_rejected(self):
        v = ControlField(np.array([0]), np.ones((1, 4), dtype=complex), T, ARC)
        with pytest.raises(ValueError):
            decompose_zero_mean(v, 0)

    def test_components_live_in_the_kernels(self):
        v = self._smooth_zero_mean_field()
        order = 16
        v1, v2, _ = decompose_zero_mean(v, order)
        system = _DiscreteSystem(np.arange(0, order + 1), T, ARC, v.steps)
        out1 = system.forward(v1)
        out2_conj_modes = ControlField(
            v.modes, np.conj(v2.values[::-1, :]), T, ARC
        )
        out2 = system.forward(out2_conj_modes)
        scale = v.norm()
        assert np.max(np.abs(out1)) <= 1e-8 * scale
        assert np.max(np.abs(out2)) <= 1e-8 * scale

    def test_residual_shrinks_with_order(self):
        v = self._smooth_zero_mean_field()
        residuals = [decompose_zero_mean(v, n)[2] for n in (8, 16, 32)]
        assert residuals[1] <= residuals[0] / 2.0
        assert residuals[2] <= residuals[1] / 2.0
