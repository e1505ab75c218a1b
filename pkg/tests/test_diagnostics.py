"""Diagnostics: reference solution, gauge monitor, error norms, time series."""

import numpy as np
import pytest

from mdkit import (
    PotentialState,
    TimeSeries,
    error_norms,
    exact_plane_wave,
    gauge_residual,
    make_grid,
    total_charge,
)
from mdkit.diagnostics import plane_wave_frequency, projector_density
from mdkit.dirac import apply_dirac_symbol, lambda0
from mdkit.fields import SpinorField

GRID = make_grid((8, 8, 8))


class TestExactPlaneWave:
    def test_unit_pointwise_density_and_charge(self):
        psi, _ = exact_plane_wave(GRID, 0.7)
        density = np.sum(np.abs(psi.data) ** 2, axis=0)
        np.testing.assert_allclose(density, 1.0, atol=1e-13)
        assert total_charge(psi) == pytest.approx(GRID.volume, rel=1e-13)

    def test_spinor_is_positive_branch_eigenstate(self):
        # Pointwise (alpha.xi + beta) psi = lambda psi for the carrier
        # frequency, which is what makes the time dependence a pure phase.
        psi, _ = exact_plane_wave(GRID, 0.0)
        xi = plane_wave_frequency(GRID, (1, 2, 3))
        lam = lambda0(xi)
        eta = [np.full(GRID.n, c) for c in xi]
        out = apply_dirac_symbol(eta, psi.data)
        np.testing.assert_allclose(out, lam * psi.data, atol=1e-12)

    def test_time_dependence_is_global_phase(self):
        t = 0.3
        psi0, _ = exact_plane_wave(GRID, 0.0)
        psit, _ = exact_plane_wave(GRID, t)
        lam = lambda0(plane_wave_frequency(GRID, (1, 2, 3)))
        np.testing.assert_allclose(
            psit.data, np.exp(-1j * lam * t) * psi0.data, atol=1e-13
        )

    def test_potentials_quadratic_in_time(self):
        t = 0.5
        _, pot = exact_plane_wave(GRID, t)
        xi = np.array(plane_wave_frequency(GRID, (1, 2, 3)))
        lam = lambda0(xi)
        np.testing.assert_allclose(pot.v, 0.5 * t * t)
        np.testing.assert_allclose(pot.v_t, t)
        for k in range(3):
            np.testing.assert_allclose(pot.a[k], 0.5 * t * t * xi[k] / lam)
            np.testing.assert_allclose(pot.a_t[k], t * xi[k] / lam)

    def test_custom_modes(self):
        psi, _ = exact_plane_wave(GRID, 0.0, modes=(2, 0, 0))
        # Carrier must live on the single mode k = (2, 0, 0).
        from mdkit.grid import dft

        hat = dft(psi.data[1])
        mask = np.zeros(GRID.n, dtype=bool)
        mask[2, 0, 0] = True
        assert float(np.max(np.abs(hat[~mask]))) <= 1e-10 * float(np.max(np.abs(hat)))


class TestGaugeResidual:
    def test_uniform_potentials_have_no_gauge_content(self):
        # Spatially uniform fields only populate the excluded zero mode.
        _, pot = exact_plane_wave(GRID, 0.9)
        assert gauge_residual(pot, 1.0) == pytest.approx(0.0, abs=1e-14)

    def test_include_mean_sees_uniform_rate(self):
        pot = PotentialState.zero(GRID)
        pot.v_t[:] = 1.0
        delta = 0.5
        n_tot = float(np.prod(GRID.n))
        assert gauge_residual(pot, delta) == 0.0
        assert gauge_residual(pot, delta, include_mean=True) == pytest.approx(
            delta * n_tot, rel=1e-13
        )

    def test_hand_built_violation_on_one_mode(self):
        # v_t = cos(2 pi x1) populates modes +/-1 with weight Ntot/2 each.
        pot = PotentialState.zero(GRID)
        pot.v_t = np.broadcast_to(np.cos(2 * np.pi * GRID.x[0]), GRID.n).copy()
        n_tot = float(np.prod(GRID.n))
        assert gauge_residual(pot, 1.0) == pytest.approx(0.5 * n_tot, rel=1e-13)

    def test_compensated_pair_is_silent(self):
        # delta d_t V + div A = 0 built by hand: A = (f, 0, 0) with
        # f = sin(2 pi x1) has div A-hat = i xi1 f-hat; choose
        # d_t V = -(1/delta) * 2 pi cos(2 pi x1).
        delta = 0.25
        pot = PotentialState.zero(GRID)
        pot.a[0] = np.sin(2 * np.pi * GRID.x[0])
        pot.v_t = -(2 * np.pi / delta) * np.broadcast_to(
            np.cos(2 * np.pi * GRID.x[0]), GRID.n
        )
        assert gauge_residual(pot, delta) <= 1e-10

    def test_normalised_by_scalar_spectrum_peak(self):
        pot = PotentialState.zero(GRID)
        pot.v_t = np.broadcast_to(np.cos(2 * np.pi * GRID.x[0]), GRID.n).copy()
        raw = gauge_residual(pot, 1.0)
        pot.v = 100.0 * np.broadcast_to(np.cos(2 * np.pi * GRID.x[1]), GRID.n)
        scaled = gauge_residual(pot, 1.0)
        peak_v_hat = 50.0 * float(np.prod(GRID.n))
        assert scaled == pytest.approx(raw / peak_v_hat, rel=1e-12)


class TestErrorNorms:
    def test_hand_values(self):
        a = np.zeros((2, 2, 2), dtype=np.complex128)
        b = np.ones((2, 2, 2), dtype=np.complex128)
        out = error_norms(a, b)
        assert out["l2_rel"] == pytest.approx(1.0)
        assert out["linf_abs"] == pytest.approx(1.0)

    def test_component_quadrature_in_linf(self):
        a = np.zeros((4, 2, 2, 2), dtype=np.complex128)
        b = np.zeros((4, 2, 2, 2), dtype=np.complex128)
        b[0, 0, 0, 0] = 3.0
        b[1, 0, 0, 0] = 4.0j
        out = error_norms(a, b)
        assert out["linf_abs"] == pytest.approx(5.0)

    def test_zero_reference_flags_infinite_relative_error(self):
        a = np.ones((2, 2, 2))
        b = np.zeros((2, 2, 2))
        assert error_norms(a, b)["l2_rel"] == float("inf")

    def test_accepts_spinor_fields(self):
        psi, _ = exact_plane_wave(GRID, 0.0)
        out = error_norms(psi, psi)
        assert out["l2_rel"] == 0.0
        assert out["linf_abs"] == 0.0

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError):
            error_norms(np.zeros((2, 2, 2)), np.zeros((4, 2, 2)))


class TestProjectorDensity:
    def test_branch_densities_sum_to_total(self):
        rng = np.random.default_rng(3)
        psi = SpinorField(
            rng.standard_normal((4,) + GRID.n)
            + 1j * rng.standard_normal((4,) + GRID.n),
            GRID,
        )
        # Cross terms integrate to zero because the branches are orthogonal.
        dp = projector_density(psi, +1, scale=0.5)
        dm = projector_density(psi, -1, scale=0.5)
        total = np.sum(np.abs(psi.data) ** 2, axis=0)
        assert float(np.sum(dp + dm)) == pytest.approx(float(np.sum(total)), rel=1e-12)

    def test_eigenstate_is_single_branch(self):
        psi, _ = exact_plane_wave(GRID, 0.0)
        dm = projector_density(psi, -1)
        assert float(np.max(dm)) <= 1e-12


class TestTimeSeries:
    def test_round_trip_exact(self, tmp_path):
        ts = TimeSeries(extra_columns=("caustic_metric",))
        ts.add(t=0.0, charge=1.0 / 3.0, gauge_residual=1e-15, caustic_metric=0.1)
        ts.add(t=0.1, charge=0.999999999999, l2_error=np.pi)
        path = tmp_path / "series.csv"
        ts.write_csv(path)
        back = TimeSeries.read_csv(path)
        assert back.columns == ts.columns
        for col in ts.columns:
            a, b = ts.column(col), back.column(col)
            for x, y in zip(a, b):
                if np.isnan(x):
                    assert np.isnan(y)
                else:
                    assert x == y  # repr round-trip is exact

    def test_missing_values_become_nan(self):
        ts = TimeSeries()
        ts.add(t=0.0, charge=1.0)
        assert np.isnan(ts.rows[0]["l2_error"])

    def test_unknown_column_rejected(self):
        ts = TimeSeries()
        with pytest.raises(ValueError):
            ts.add(t=0.0, charge=1.0, bogus=1.0)
