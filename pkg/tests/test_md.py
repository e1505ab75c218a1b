"""Coupled-solver substep tests.

Oracles: the wave update is compared per mode against a dense 2x2
trapezoidal solve (`np.linalg.solve`); the potential rotation against
pointwise `scipy.linalg.expm`; spatially uniform fields against the exact
quadratic-in-time solution.
"""

import logging

import numpy as np
import pytest
import scipy.linalg

from mdkit import (
    ALPHA,
    ExternalFields,
    MdState,
    PotentialState,
    SimConfig,
    SpinorField,
    advance,
    dirac_matrix,
    gauge_consistent_init,
    gauge_residual,
    make_grid,
    step1,
    step2,
    total_charge,
)
from mdkit.fields import gaussian_spinor
from mdkit.grid import dft, idft
from mdkit.md import _cn_wave_update, _dealias_mask

RNG = np.random.default_rng(7)


def random_state(grid, with_pot=True):
    psi = SpinorField(
        RNG.standard_normal((4,) + grid.n) + 1j * RNG.standard_normal((4,) + grid.n),
        grid,
    )
    pot = PotentialState.zero(grid)
    if with_pot:
        pot.v = RNG.standard_normal(grid.n)
        pot.v_t = RNG.standard_normal(grid.n)
        pot.a = RNG.standard_normal((3,) + grid.n)
        pot.a_t = RNG.standard_normal((3,) + grid.n)
    return MdState(psi, pot, 0.0)


class TestWaveUpdate:
    def test_matches_dense_trapezoidal_solve(self):
        # Per mode the update solves
        #   (I - dt/2 M) y1 = (I + dt/2 M) y0 + (dt/2) (g0 + g1),
        # with M = [[0, 1], [-|xi|^2/d^2, 0]] and g = [0, c*s/d^2].
        grid = make_grid((4, 4, 4))
        dt, delta, coeff = 1.0 / 32, 0.3, 0.7
        fhat = RNG.standard_normal(grid.n) + 1j * RNG.standard_normal(grid.n)
        fthat = RNG.standard_normal(grid.n) + 1j * RNG.standard_normal(grid.n)
        s0 = RNG.standard_normal(grid.n) + 1j * RNG.standard_normal(grid.n)
        s1 = RNG.standard_normal(grid.n) + 1j * RNG.standard_normal(grid.n)
        f_new, ft_new = _cn_wave_update(fhat, fthat, s0, s1, grid, dt, delta, coeff)

        d2 = delta * delta
        for idx in np.ndindex(grid.n):
            w2 = grid.xi_sq[idx] / d2
            m = np.array([[0.0, 1.0], [-w2, 0.0]])
            y0 = np.array([fhat[idx], fthat[idx]])
            g = np.array([0.0, coeff / d2]) * (s0[idx] + s1[idx])
            lhs = np.eye(2) - 0.5 * dt * m
            rhs = (np.eye(2) + 0.5 * dt * m) @ y0 + 0.5 * dt * g
            y1 = np.linalg.solve(lhs, rhs)
            assert abs(f_new[idx] - y1[0]) <= 1e-12 * max(1.0, abs(y1[0]))
            assert abs(ft_new[idx] - y1[1]) <= 1e-12 * max(1.0, abs(y1[1]))

    def test_uniform_constant_source_is_exact_quadratic(self):
        # At xi = 0 with constant source c the field grows as
        # f(t) = coeff*c*t^2/(2 delta^2), and the trapezoidal rule
        # reproduces it exactly step after step.
        grid = make_grid((4, 4, 4))
        dt, delta, coeff, c = 1.0 / 16, 0.5, 0.8, 2.5
        shat = np.zeros(grid.n, dtype=np.complex128)
        shat[0, 0, 0] = c * np.prod(grid.n)  # uniform field in hat space
        f = np.zeros(grid.n, dtype=np.complex128)
        ft = np.zeros(grid.n, dtype=np.complex128)
        for _ in range(5):
            f, ft = _cn_wave_update(f, ft, shat, shat, grid, dt, delta, coeff)
        t = 5 * dt
        expect = coeff * c * t * t / (2.0 * delta * delta)
        assert idft(f).real[0, 0, 0] == pytest.approx(expect, rel=1e-12)
        assert idft(ft).real[0, 0, 0] == pytest.approx(
            coeff * c * t / (delta * delta), rel=1e-12
        )

    def test_free_oscillation_conserves_mode_energy(self):
        # Without sources the trapezoidal rule preserves
        # delta^2 |f_t|^2 + |xi|^2 |f|^2 exactly.
        grid = make_grid((8, 8, 8))
        dt, delta = 1.0 / 8, 0.4
        f = dft(RNG.standard_normal(grid.n))
        ft = dft(RNG.standard_normal(grid.n))
        zero = np.zeros_like(f)
        energy0 = delta**2 * np.abs(ft) ** 2 + grid.xi_sq * np.abs(f) ** 2
        for _ in range(100):
            f, ft = _cn_wave_update(f, ft, zero, zero, grid, dt, delta, 1.0)
        energy1 = delta**2 * np.abs(ft) ** 2 + grid.xi_sq * np.abs(f) ** 2
        np.testing.assert_allclose(energy1, energy0, rtol=1e-11, atol=1e-9)


class TestStep1:
    def test_preserves_charge(self):
        grid = make_grid((8, 8, 8))
        state = random_state(grid)
        cfg = SimConfig(grid=grid, epsilon=0.5, delta=0.5, dt=1 / 32, t_final=1 / 32)
        out = step1(state, cfg, cfg.dt)
        assert total_charge(out.psi) == pytest.approx(
            total_charge(state.psi), rel=1e-12
        )

    def test_dealias_masks_wave_sources(self):
        # Starting from zero potentials, every surviving mode of V comes
        # from the (masked) source, so the masked band must stay empty.
        grid = make_grid((12, 12, 12))
        state = random_state(grid, with_pot=False)
        cfg = SimConfig(
            grid=grid, epsilon=1.0, delta=1.0, dt=1 / 32, t_final=1 / 32, dealias=True
        )
        out = step1(state, cfg, cfg.dt)
        mask = _dealias_mask(grid)
        v_hat = dft(out.pot.v)
        assert float(np.max(np.abs(v_hat[mask == 0.0]))) <= 1e-10

    def test_without_dealias_sources_fill_band(self):
        grid = make_grid((12, 12, 12))
        state = random_state(grid, with_pot=False)
        cfg = SimConfig(grid=grid, epsilon=1.0, delta=1.0, dt=1 / 32, t_final=1 / 32)
        out = step1(state, cfg, cfg.dt)
        mask = _dealias_mask(grid)
        v_hat = dft(out.pot.v)
        assert float(np.max(np.abs(v_hat[mask == 0.0]))) > 1e-10


class TestStep2:
    def test_matches_pointwise_expm(self):
        grid = make_grid((4, 4, 4))
        eps, dt = 0.3, 1.0 / 16
        state = random_state(grid)
        cfg = SimConfig(grid=grid, epsilon=eps, dt=dt, t_final=dt)
        out = step2(state, cfg, dt, (0.0, dt))
        for idx in [(0, 0, 0), (1, 2, 3), (3, 3, 1), (2, 0, 3)]:
            w = state.pot.v[idx]
            a = state.pot.a[(slice(None),) + idx]
            gen = w * np.eye(4) - sum(a[k] * ALPHA[k] for k in range(3))
            u = scipy.linalg.expm(-1j * dt / eps * gen)
            expect = u @ state.psi.data[(slice(None),) + idx]
            np.testing.assert_allclose(
                out.psi.data[(slice(None),) + idx], expect, atol=1e-12
            )

    def test_zero_vector_potential_reduces_to_phase(self):
        grid = make_grid((4, 4, 4))
        state = random_state(grid)
        state.pot.a[:] = 0.0
        cfg = SimConfig(grid=grid, epsilon=1.0, dt=1 / 8, t_final=1 / 8)
        out = step2(state, cfg, cfg.dt, (0.0, cfg.dt))
        expect = np.exp(-1j * cfg.dt * state.pot.v) * state.psi.data
        np.testing.assert_allclose(out.psi.data, expect, atol=1e-13)

    def test_external_scalar_uses_span_average(self):
        # v_ex(t) = t: averaging over [t0, t1] adds the midpoint value.
        grid = make_grid((4, 4, 4))
        state = random_state(grid)
        state.pot.v[:] = 0.0
        state.pot.a[:] = 0.0
        ext = ExternalFields(v_ex=lambda t, x: t + 0.0 * x[0], a_ex=None)
        cfg = SimConfig(grid=grid, epsilon=1.0, dt=1 / 8, t_final=1 / 8, external=ext)
        t0, t1 = 0.25, 0.375
        out = step2(state, cfg, cfg.dt, (t0, t1))
        expect = np.exp(-1j * cfg.dt * 0.5 * (t0 + t1)) * state.psi.data
        np.testing.assert_allclose(out.psi.data, expect, atol=1e-13)

    def test_external_vector_uses_span_midpoint(self):
        grid = make_grid((4, 4, 4))
        state = random_state(grid)
        state.pot.v[:] = 0.0
        state.pot.a[:] = 0.0
        ext = ExternalFields(v_ex=None, a_ex=lambda t, x: (t, 0.0 * x[0], 0.0 * x[0]))
        cfg = SimConfig(grid=grid, epsilon=1.0, dt=1 / 8, t_final=1 / 8, external=ext)
        t0, t1 = 0.5, 0.625
        out = step2(state, cfg, cfg.dt, (t0, t1))
        a_mid = np.array([0.5 * (t0 + t1), 0.0, 0.0])
        gen = -sum(a_mid[k] * ALPHA[k] for k in range(3))
        u = scipy.linalg.expm(-1j * cfg.dt * gen)
        expect = np.einsum("ij,j...->i...", u, state.psi.data)
        np.testing.assert_allclose(out.psi.data, expect, atol=1e-12)

    def test_is_isometry(self):
        grid = make_grid((8, 8, 8))
        state = random_state(grid)
        cfg = SimConfig(grid=grid, epsilon=0.01, dt=1 / 32, t_final=1 / 32)
        out = step2(state, cfg, cfg.dt, (0.0, cfg.dt))
        np.testing.assert_allclose(
            np.sum(np.abs(out.psi.data) ** 2, axis=0),
            np.sum(np.abs(state.psi.data) ** 2, axis=0),
            rtol=1e-12,
            atol=1e-12,
        )


class TestAdvance:
    def test_both_splittings_conserve_charge(self):
        grid = make_grid((8, 8, 8))
        for splitting in ("strang", "first_order"):
            state = random_state(grid)
            cfg = SimConfig(
                grid=grid,
                epsilon=0.5,
                delta=0.5,
                dt=1 / 32,
                t_final=1 / 32,
                splitting=splitting,
            )
            q0 = total_charge(state.psi)
            for _ in range(4):
                state = advance(state, cfg)
            assert total_charge(state.psi) == pytest.approx(q0, rel=1e-12)
            assert state.time == pytest.approx(4 / 32)

    def test_strang_is_second_order_on_travelling_wave(self):
        # Halving dt must cut the final-time error by about four.
        from mdkit.presets import make_preset

        errors = []
        for dt in (1.0 / 32, 1.0 / 64):
            preset = make_preset("exact_plane_wave", n=(8, 8, 8), dt=dt, t_final=0.125)
            state = preset.md_state()
            cfg = preset.cfg
            while state.time < cfg.t_final - 1e-12:
                state = advance(state, cfg)
            ref, _ = preset.reference(state.time)
            err = np.max(np.abs(state.psi.data - ref.data))
            errors.append(float(err))
        ratio = errors[0] / errors[1]
        assert 3.5 <= ratio <= 4.5


class TestGaugeInit:
    def test_zero_option_returns_rest(self):
        grid = make_grid((8, 8, 8))
        psi = gaussian_spinor(grid, chi=(1, 0, 0, 0))
        cfg = SimConfig(grid=grid, dt=1 / 16, t_final=1 / 16)
        pot = gauge_consistent_init(psi, cfg, "zero", "zero")
        for fld in (pot.v, pot.v_t, pot.a, pot.a_t):
            assert float(np.max(np.abs(fld))) == 0.0

    def test_poisson_scalar_solves_poisson(self):
        grid = make_grid((16, 16, 16))
        psi = gaussian_spinor(grid, chi=(1, 1, 1, 1), width=0.1)
        cfg = SimConfig(grid=grid, epsilon=0.25, delta=0.5, dt=1 / 16, t_final=1 / 16)
        pot = gauge_consistent_init(psi, cfg, "poisson", "poisson")
        # -Lap V = eps (rho - mean) mode by mode.
        rho_hat = dft(np.sum(np.abs(psi.data) ** 2, axis=0))
        rho_hat[0, 0, 0] = 0.0
        lap_v = grid.xi_sq * dft(pot.v)
        np.testing.assert_allclose(
            lap_v, cfg.epsilon * rho_hat, atol=1e-9 * float(np.max(np.abs(rho_hat)))
        )

    def test_poisson_init_closes_gauge_relation(self):
        grid = make_grid((16, 16, 16))
        psi = gaussian_spinor(grid, chi=(1, 1, 1, 1), width=0.1)
        cfg = SimConfig(grid=grid, epsilon=0.25, delta=0.2, dt=1 / 16, t_final=1 / 16)
        pot = gauge_consistent_init(psi, cfg, "poisson", "poisson")
        assert gauge_residual(pot, cfg.delta) <= 1e-12

    def test_mean_removal_is_logged(self, caplog):
        grid = make_grid((8, 8, 8))
        psi = gaussian_spinor(grid, chi=(1, 0, 0, 0))  # strictly positive density
        cfg = SimConfig(grid=grid, dt=1 / 16, t_final=1 / 16)
        with caplog.at_level(logging.WARNING, logger="mdkit.md"):
            gauge_consistent_init(psi, cfg, "poisson", "zero")
        assert any("removed a mean" in r.message for r in caplog.records)

    def test_rejects_unknown_option(self):
        grid = make_grid((8, 8, 8))
        psi = gaussian_spinor(grid)
        cfg = SimConfig(grid=grid, dt=1 / 16, t_final=1 / 16)
        with pytest.raises(ValueError):
            gauge_consistent_init(psi, cfg, "bogus", "zero")
