"""Schroedinger-Poisson solver for the non-relativistic limit regime.

Two four-component envelopes evolve under opposite-sign kinetic operators

    i d_t phi_e = -1/2 Lap phi_e + (V + V_ex) phi_e
    i d_t phi_p = +1/2 Lap phi_p + (V + V_ex) phi_p
    -Lap V = |phi_e|^2 + |phi_p|^2   (mean removed)

split into an exact Fourier kinetic step (with the Poisson solve on the
post-kinetic densities) and an exact pointwise potential phase.  Both
substeps are isometries, so the discrete charge is conserved to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import charge_density, nr_projector_split
from .fields import SimConfig, SpinorField, total_charge
from .grid import ArrayR, GridSpec, dft, idft
from .md import _poisson_hat


@dataclass
class SpState:
    phi_e: SpinorField
    phi_p: SpinorField
    v: ArrayR
    time: float = 0.0

    def copy(self) -> "SpState":
        return SpState(self.phi_e.copy(), self.phi_p.copy(), self.v.copy(), self.time)


def sp_init(psi0: SpinorField, delta: float, limit: bool = False) -> SpState:
    """Initial envelopes by splitting a spinor into its energy branches.

    phi_e(0) = Pi_e(delta D) psi0, phi_p(0) = Pi_p(delta D) psi0 (no phase
    removal at t = 0); the initial V comes from the Poisson solve.
    """
    phi_e, phi_p = nr_projector_split(psi0, delta, limit=limit)
    state = SpState(phi_e, phi_p, np.zeros(psi0.grid.n), 0.0)
    state.v = _solve_poisson(state)
    return state


def _solve_poisson(state: SpState) -> ArrayR:
    rho = charge_density(state.phi_e) + charge_density(state.phi_p)
    grid = state.phi_e.grid
    return idft(_poisson_hat(dft(rho), grid, 1.0)).real


def sp_step1(state: SpState, dt: float) -> SpState:
    """Kinetic half of the flow plus the Poisson update.

    The electron branch rotates by exp(-i |xi|^2 dt / 2) and the positron
    branch by the conjugate phase; V is refreshed from the post-kinetic
    densities so step 2 sees a consistent potential.
    """
    grid = state.phi_e.grid
    kin = np.exp(-0.5j * dt * grid.xi_sq)
    phi_e = SpinorField(idft(kin * dft(state.phi_e.data)), grid)
    phi_p = SpinorField(idft(np.conj(kin) * dft(state.phi_p.data)), grid)
    out = SpState(phi_e, phi_p, state.v, state.time)
    out.v = _solve_poisson(out)
    return out


def sp_step2(
    state: SpState, cfg: SimConfig, dt: float, t_span: tuple[float, float]
) -> SpState:
    """Exact potential phase exp(-i (V + V_ex) dt) on both branches."""
    grid = state.phi_e.grid
    w = state.v
    t0, t1 = t_span
    v0 = cfg.external.scalar_at(t0, grid)
    if v0 is not None:
        v1 = cfg.external.scalar_at(t1, grid)
        w = w + 0.5 * (v0 + v1)
    phase = np.exp(-1j * dt * w)
    return SpState(
        SpinorField(phase * state.phi_e.data, grid),
        SpinorField(phase * state.phi_p.data, grid),
        state.v,
        state.time,
    )


def sp_advance(state: SpState, cfg: SimConfig) -> SpState:
    dt = cfg.dt
    t0 = state.time
    span = (t0, t0 + dt)
    if cfg.splitting == "strang":
        out = sp_step1(state, 0.5 * dt)
        out = sp_step2(out, cfg, dt, span)
        out = sp_step1(out, 0.5 * dt)
    else:
        out = sp_step1(state, dt)
        out = sp_step2(out, cfg, dt, span)
    out.time = t0 + dt
    return out


def sp_charge(state: SpState) -> float:
    return total_charge(state.phi_e) + total_charge(state.phi_p)
