"""Time-splitting spectral solver for the coupled Dirac / wave-potential system.

One step splits the flow into

  step 1: exact free Dirac flow in Fourier space, together with a
          Crank-Nicolson update of the scalar and vector wave equations
          whose sources are the charge/current densities at both ends of
          the substep;
  step 2: pointwise multiplication by the exact exponential of the
          potential term, exp(-i dt (W - alpha . A_tot)/eps), which closes
          in I and alpha . A_tot because (alpha . a)^2 = |a|^2 I.

Prescribed background potentials enter step 2 with the scalar part averaged
over the substep (the scalar phase commutes with itself in time, so the
interval average is the exact phase for time-dependent W_ex) and the vector
part frozen at the midpoint (a second-order quadrature for the
non-commuting matrix factor).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dirac import (
    apply_alpha_dot,
    charge_density,
    current_density,
    step1_propagator,
    symbol_tables,
)
from .fields import PotentialState, SimConfig, SpinorField
from .grid import ArrayC, ArrayR, GridSpec, dft, idft

log = logging.getLogger(__name__)


@dataclass
class MdState:
    """Spinor plus self-consistent potentials at one instant."""

    psi: SpinorField
    pot: PotentialState
    time: float = 0.0

    def copy(self) -> "MdState":
        return MdState(self.psi.copy(), self.pot.copy(), self.time)


@lru_cache(maxsize=32)
def _dealias_mask(grid: GridSpec) -> ArrayR:
    """Two-thirds-rule mask on the dual lattice."""
    mask = np.ones(grid.n)
    for ax, m in enumerate(grid.n):
        k = np.fft.fftfreq(m, d=1.0 / m)
        keep = np.abs(k) <= m / 3.0
        shape = [1, 1, 1]
        shape[ax] = m
        mask = mask * keep.reshape(shape)
    return mask


def _cn_wave_update(
    fhat: ArrayC,
    fthat: ArrayC,
    shat0: ArrayC,
    shat1: ArrayC,
    grid: GridSpec,
    dt: float,
    delta: float,
    coeff: float,
) -> tuple[ArrayC, ArrayC]:
    """Crank-Nicolson step for (delta^2 d_tt - Lap) f = coeff * source, per mode.

    Exact trapezoidal-in-source update of the first-order system for
    (f, d_t f); unconditionally stable for any dt.
    """
    xi_sq = grid.xi_sq
    d2 = delta * delta
    s = dt * dt * xi_sq / (4.0 * d2)
    den = 1.0 + s
    src = shat0 + shat1
    f_new = ((1.0 - s) * fhat + dt * fthat + coeff * dt * dt / (4.0 * d2) * src) / den
    ft_new = (
        -(dt * xi_sq / d2) * fhat + (1.0 - s) * fthat + coeff * dt / (2.0 * d2) * src
    ) / den
    return f_new, ft_new


def step1(state: MdState, cfg: SimConfig, dt: float) -> MdState:
    """Free Dirac flow plus wave-equation update over one substep of length dt."""
    grid = state.psi.grid
    tables = symbol_tables(grid, dt, cfg.epsilon, cfg.delta)

    rho0 = charge_density(state.psi)
    j0 = current_density(state.psi) / cfg.delta

    psi_new = step1_propagator(state.psi, tables)

    rho1 = charge_density(psi_new)
    j1 = current_density(psi_new) / cfg.delta

    rho0_hat, rho1_hat = dft(rho0), dft(rho1)
    j0_hat, j1_hat = dft(j0), dft(j1)
    if cfg.dealias:
        mask = _dealias_mask(grid)
        rho0_hat, rho1_hat = mask * rho0_hat, mask * rho1_hat
        j0_hat, j1_hat = mask * j0_hat, mask * j1_hat

    v_hat, vt_hat = _cn_wave_update(
        dft(state.pot.v),
        dft(state.pot.v_t),
        rho0_hat,
        rho1_hat,
        grid,
        dt,
        cfg.delta,
        coeff=cfg.epsilon,
    )
    a_hat, at_hat = _cn_wave_update(
        dft(state.pot.a),
        dft(state.pot.a_t),
        j0_hat,
        j1_hat,
        grid,
        dt,
        cfg.delta,
        coeff=cfg.epsilon * cfg.delta,
    )

    pot = PotentialState(
        idft(v_hat).real,
        idft(vt_hat).real,
        idft(a_hat).real,
        idft(at_hat).real,
        grid,
    )
    return MdState(psi_new, pot, state.time)


def step2(
    state: MdState, cfg: SimConfig, dt: float, t_span: tuple[float, float]
) -> MdState:
    """Potential phase rotation over [t0, t1] (t1 - t0 need not equal dt).

    The self-consistent fields are frozen (they do not evolve in this
    substep); the prescribed scalar background is averaged over the span
    and the vector background evaluated at its midpoint.
    """
    grid = state.psi.grid
    t0, t1 = t_span

    w = state.pot.v
    v0 = cfg.external.scalar_at(t0, grid)
    if v0 is not None:
        v1 = cfg.external.scalar_at(t1, grid)
        w = w + 0.5 * (v0 + v1)

    a_tot = state.pot.a
    a_ex = cfg.external.vector_at(0.5 * (t0 + t1), grid)
    if a_ex is not None:
        a_tot = a_tot + a_ex

    tau = dt / cfg.epsilon
    r = np.sqrt(a_tot[0] ** 2 + a_tot[1] ** 2 + a_tot[2] ** 2)
    phase = np.exp(-1j * tau * w)
    # exp(i tau alpha.A) = cos(tau r) I + i sin(tau r)/r * alpha.A; the
    # sin(z)/z factor goes through np.sinc, which handles r -> 0 exactly.
    mix = 1j * tau * np.sinc(tau * r / np.pi) * phase
    data = phase * np.cos(tau * r) * state.psi.data + mix * apply_alpha_dot(
        a_tot, state.psi.data
    )
    return MdState(SpinorField(data, grid), state.pot, state.time)


def advance(state: MdState, cfg: SimConfig) -> MdState:
    """One full step of length cfg.dt using the configured splitting."""
    dt = cfg.dt
    t0 = state.time
    span = (t0, t0 + dt)
    if cfg.splitting == "strang":
        out = step1(state, cfg, 0.5 * dt)
        out = step2(out, cfg, dt, span)
        out = step1(out, cfg, 0.5 * dt)
    else:  # first_order
        out = step1(state, cfg, dt)
        out = step2(out, cfg, dt, span)
    out.time = t0 + dt
    return out


def _poisson_hat(source_hat: ArrayC, grid: GridSpec, coeff: float) -> ArrayC:
    """Solve -Lap f = coeff * source per mode with the mean removed."""
    xi_sq = grid.xi_sq.copy()
    zero = xi_sq == 0.0
    xi_sq[zero] = 1.0
    out = coeff * source_hat / xi_sq
    out[..., zero] = 0.0
    return out


def _mean_fraction(source: ArrayR) -> float:
    """|mean| of the source relative to its peak, per component worst case."""
    flat = source.reshape(-1, source.shape[-3] * source.shape[-2] * source.shape[-1])
    scale = float(np.max(np.abs(flat))) or 1.0
    return float(np.max(np.abs(flat.mean(axis=1)))) / scale


def _zero_nyquist(fhat: ArrayC, grid: GridSpec) -> ArrayC:
    """Zero the three Nyquist hyperplanes of a spectrum (in place)."""
    for ax, m in enumerate(grid.n):
        idx = [slice(None)] * fhat.ndim
        idx[fhat.ndim - 3 + ax] = m // 2
        fhat[tuple(idx)] = 0.0
    return fhat


def gauge_consistent_init(
    psi: SpinorField,
    cfg: SimConfig,
    v0: str = "zero",
    a0: str = "zero",
    mean_warn: float = 1e-10,
) -> PotentialState:
    """Initial potentials compatible with the discrete evolution.

    v0, a0 in {"zero", "poisson"}: either start the wave fields from rest
    or from the static solutions -Lap V = eps * rho and
    -Lap A_k = eps*delta * J_k (means removed; removal beyond `mean_warn`
    relative to the source peak is logged, not fatal).  The scalar rate is
    always set to d_t V = -(1/delta) div A so the discrete Lorenz-gauge
    combination delta d_t V-hat + i xi . A-hat vanishes mode by mode.
    """
    grid = psi.grid
    for name, val in (("v0", v0), ("a0", a0)):
        if val not in ("zero", "poisson"):
            raise ValueError(f"{name} must be 'zero' or 'poisson', got {val!r}")

    pot = PotentialState.zero(grid)

    if v0 == "poisson":
        rho = charge_density(psi)
        frac = _mean_fraction(rho)
        if frac > mean_warn:
            log.warning(
                "scalar Poisson init removed a mean of %.3e (relative to source peak)",
                frac,
            )
        pot.v = idft(_poisson_hat(dft(rho), grid, cfg.epsilon)).real

    if a0 == "poisson":
        j = current_density(psi) / cfg.delta
        frac = _mean_fraction(j)
        if frac > mean_warn:
            log.warning(
                "vector Poisson init removed a mean of %.3e (relative to source peak)",
                frac,
            )
        j_hat = dft(j)
        a_hat = _poisson_hat(j_hat, grid, cfg.epsilon * cfg.delta)
        # A is restricted to the band where spectral first derivatives are
        # exact: with a Nyquist component the required d_t V would not be a
        # real field, and the gauge combination could not vanish there.
        _zero_nyquist(a_hat, grid)
        pot.a = idft(a_hat).real
        div_hat = sum(1j * xi * a_hat[k] for k, xi in enumerate(grid.xi_deriv))
        pot.v_t = idft(-div_hat / cfg.delta).real

    return pot
