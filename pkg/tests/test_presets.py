"""Preset catalogue behaviour."""

import numpy as np
import pytest

from mdkit import total_charge
from mdkit.presets import PRESET_NAMES, make_preset
from mdkit.wkb import wkb_charge

EXPECTED_NAMES = {
    "exact_plane_wave",
    "steady_state",
    "self_consistent",
    "harmonic",
    "nr_gaussian",
    "nr_harmonic",
    "custom",
}


def test_catalogue_is_complete():
    assert set(PRESET_NAMES) == EXPECTED_NAMES


def test_unknown_preset_rejected():
    with pytest.raises(ValueError):
        make_preset("not_a_preset")


def test_unknown_override_rejected():
    with pytest.raises(ValueError):
        make_preset("custom", wavelength=3)


def test_none_override_keeps_default():
    p = make_preset("nr_gaussian", delta=None)
    assert p.cfg.delta == 0.01


def test_override_wins():
    p = make_preset("nr_gaussian", n=(8, 8, 8), dt=1.0 / 16, t_final=0.5)
    assert p.cfg.grid.n == (8, 8, 8)
    assert p.cfg.dt == 1.0 / 16
    assert p.cfg.n_steps == 8


@pytest.mark.parametrize("name", sorted(EXPECTED_NAMES))
def test_every_preset_builds_md_state(name):
    p = make_preset(name, n=(8, 8, 8))
    state = p.md_state()
    assert state.time == 0.0
    assert total_charge(state.psi) > 0.0


def test_scaling_regimes():
    assert make_preset("steady_state").cfg.epsilon == 0.01
    assert make_preset("steady_state").cfg.delta == 1.0
    assert make_preset("nr_gaussian").cfg.epsilon == 1.0
    assert make_preset("nr_gaussian").cfg.delta == 0.01
    assert make_preset("exact_plane_wave").cfg.epsilon == 1.0
    assert make_preset("exact_plane_wave").cfg.delta == 1.0


def test_nr_presets_use_static_field_init():
    p = make_preset("nr_gaussian")
    assert (p.v0, p.a0) == ("poisson", "poisson")


def test_wkb_formulations():
    for name in ("steady_state", "harmonic", "self_consistent"):
        p = make_preset(name, n=(8, 8, 8))
        state = p.wkb_state()
        assert wkb_charge(state) > 0.0
    with pytest.raises(ValueError):
        make_preset("nr_gaussian", n=(8, 8, 8)).wkb_state()


def test_plane_wave_reference_matches_initial_state():
    p = make_preset("exact_plane_wave", n=(8, 8, 8))
    psi_ref, _ = p.reference(0.0)
    np.testing.assert_allclose(p.psi0().data, psi_ref.data, atol=1e-14)


def test_oscillatory_preset_carries_fast_phase():
    # The wavefunction preset applies exp(i phase / eps); the WKB variant
    # stores the same amplitude without the fast factor.
    p = make_preset("self_consistent", n=(16, 16, 16))
    psi = p.psi0()
    state = p.wkb_state()
    recon = state.u_p.data + state.u_m.data
    density_psi = np.sum(np.abs(psi.data) ** 2, axis=0)
    density_amp = np.sum(np.abs(recon) ** 2, axis=0)
    np.testing.assert_allclose(density_psi, density_amp, atol=1e-12)
    assert float(np.max(np.abs(psi.data - recon))) > 1e-3  # phases do differ


def test_resolved_parameters_recorded():
    p = make_preset("custom", chi=(0, 1, 0, 0), center=(0.1, 0.0, -0.2), width=0.05)
    assert p.chi == (0, 1, 0, 0)
    assert p.center == (0.1, 0.0, -0.2)
    assert p.width == 0.05
