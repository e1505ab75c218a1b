"""Semi-classical (WKB) solver: eiconal phases, polarised amplitude
transport, and self-consistent wave potentials.

The oscillatory spinor is represented as

    psi ~ u+ exp(i phi+/eps) + u- exp(i phi-/eps)

with phases solving the two-branch eiconal equation

    d_t phi+- + h+-(x, grad phi+-) = 0,   h+-(x, p) = +-sqrt(1+|p|^2) + V_ex(x)

by a local Lax-Friedrichs Hamiltonian with minmod-limited one-sided
differences and RK4 in time (the phases stay smooth only up to caustic
formation, which is what the caustic metric watches for), and amplitudes
solving the conservative transport equation

    d_t u + div(omega u) = 1/2 div(omega) u + i (calA . omega - calV) u

with omega = grad_p h evaluated at the numerical phase gradient.  The
transport splits like the full solver: a skew (charge-conserving)
advection half treated by Crank-Nicolson fixed-point iteration, then an
exact pointwise phase for the potential term.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dirac import apply_projector, lambda0
from .fields import PotentialState, SimConfig, SpinorField, total_charge
from .grid import (
    ArrayC,
    ArrayR,
    GridSpec,
    dft,
    idft,
    spectral_divergence,
    spectral_gradient,
)
from .md import _cn_wave_update

log = logging.getLogger(__name__)


@dataclass
class WkbState:
    """Phases, amplitudes and wave potentials of the two-branch ansatz."""

    phi_p: ArrayR
    phi_m: ArrayR
    u_p: SpinorField
    u_m: SpinorField
    pot: PotentialState
    time: float = 0.0
    caustic_metric: float = 0.0
    caustic_flag: bool = False

    def copy(self) -> "WkbState":
        return WkbState(
            self.phi_p.copy(),
            self.phi_m.copy(),
            self.u_p.copy(),
            self.u_m.copy(),
            self.pot.copy(),
            self.time,
            self.caustic_metric,
            self.caustic_flag,
        )


# ---------------------------------------------------------------------------
# eiconal equation
# ---------------------------------------------------------------------------


def _minmod(a: ArrayR, b: ArrayR) -> ArrayR:
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def one_sided_gradients(phi: ArrayR, grid: GridSpec) -> tuple[ArrayR, ArrayR]:
    """Second-order minmod-limited one-sided differences per axis.

    Returns (p_minus, p_plus), each of shape (3, n1, n2, n3).
    """
    pm = np.empty((3,) + grid.n)
    pp = np.empty((3,) + grid.n)
    for ax in range(3):
        dx = grid.dx[ax]
        fp = np.roll(phi, -1, axis=ax)
        fm = np.roll(phi, 1, axis=ax)
        d2 = fp - 2.0 * phi + fm
        pp[ax] = (fp - phi) / dx - _minmod(d2, np.roll(d2, -1, axis=ax)) / (2.0 * dx)
        pm[ax] = (phi - fm) / dx + _minmod(np.roll(d2, 1, axis=ax), d2) / (2.0 * dx)
    return pm, pp


def _llf_alphas(pm: ArrayR, pp: ArrayR) -> np.ndarray:
    """Per-axis viscosity bounds max |d h / d p_j| = max |p_j| / lambda0(p)."""
    pavg = 0.5 * (pm + pp)
    lam = lambda0(pavg)
    return np.array([float(np.max(np.abs(pavg[j]) / lam)) for j in range(3)])


def eiconal_rhs(
    phi: ArrayR,
    sign: int,
    v_ex: ArrayR | None,
    grid: GridSpec,
    alphas: np.ndarray,
) -> ArrayR:
    """-H_hat(x, p-, p+) with the local Lax-Friedrichs numerical Hamiltonian."""
    pm, pp = one_sided_gradients(phi, grid)
    pavg = 0.5 * (pm + pp)
    h = sign * lambda0(pavg)
    if v_ex is not None:
        h = h + v_ex
    visc = sum(alphas[j] * (pp[j] - pm[j]) for j in range(3))
    return -(h - 0.5 * visc)


def eiconal_step(
    phi: ArrayR,
    dt: float,
    sign: int,
    v_ex: ArrayR | None,
    grid: GridSpec,
) -> ArrayR:
    """One RK4 step of the eiconal equation for a single branch.

    The LLF viscosity coefficients are refreshed once per step (not per
    stage).  A violated CFL bound dt <= dx / (2 max_j alpha_j) is reported
    as a warning; the step still proceeds.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    pm, pp = one_sided_gradients(phi, grid)
    alphas = _llf_alphas(pm, pp)
    a_max = float(alphas.max())
    if a_max > 1e-12 and dt > min(grid.dx) / (2.0 * a_max):
        warnings.warn(
            f"eiconal CFL bound violated: dt = {dt:.3e} > "
            f"{min(grid.dx) / (2.0 * a_max):.3e}",
            RuntimeWarning,
            stacklevel=2,
        )

    def rhs(p: ArrayR) -> ArrayR:
        return eiconal_rhs(p, sign, v_ex, grid, alphas)

    k1 = rhs(phi)
    k2 = rhs(phi + 0.5 * dt * k1)
    k3 = rhs(phi + 0.5 * dt * k2)
    k4 = rhs(phi + dt * k3)
    return phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def branch_velocity(phi: ArrayR, sign: int, grid: GridSpec) -> ArrayR:
    """omega = sign * grad(phi) / lambda0(grad(phi)), spectral gradient."""
    g = spectral_gradient(phi, grid)
    return sign * g / lambda0(g)


def caustic_metric(state_or_phi, grid: GridSpec | None = None) -> float:
    """Max over branches and grid of |div omega|; blows up near caustics."""
    if isinstance(state_or_phi, WkbState):
        grid = state_or_phi.u_p.grid
        vals = []
        for phi, sign in ((state_or_phi.phi_p, +1), (state_or_phi.phi_m, -1)):
            div = spectral_divergence(branch_velocity(phi, sign, grid), grid)
            vals.append(float(np.max(np.abs(div))))
        return max(vals)
    if grid is None:
        raise ValueError("grid required when passing a bare phase field")
    div = spectral_divergence(branch_velocity(state_or_phi, +1, grid), grid)
    return float(np.max(np.abs(div)))


# ---------------------------------------------------------------------------
# amplitude transport
# ---------------------------------------------------------------------------


def _transport_apply(
    u: ArrayC, omega: ArrayR, div_omega: ArrayR, grid: GridSpec
) -> ArrayC:
    """L(u) = -div(omega u) + 1/2 div(omega) u, skew on the discrete lattice."""
    acc = 0.5 * dft(div_omega * u)
    for j, xi in enumerate(grid.xi_deriv):
        acc = acc - 1j * xi * dft(omega[j] * u)
    return idft(acc)


def transport_step1(
    u: SpinorField,
    omega: ArrayR,
    dt: float,
    tol: float = 1e-11,
    max_iter: int = 200,
) -> tuple[SpinorField, int]:
    """Crank-Nicolson advection step solved by fixed-point iteration.

    Returns the updated amplitude and the iteration count; failure to
    converge within max_iter is logged and the last iterate returned.

    The discrete generator is skew -- and the step norm-conserving --
    exactly when the squared amplitude is resolved on the grid; an
    amplitude with spectral content near the band edge leaks charge at
    the level of that tail.
    """
    grid = u.grid
    div_omega = spectral_divergence(omega, grid)
    lu0 = _transport_apply(u.data, omega, div_omega, grid)
    scale = float(np.max(np.abs(u.data)))
    if scale == 0.0:
        return u.copy(), 0
    cur = u.data + dt * lu0
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new = u.data + 0.5 * dt * (lu0 + _transport_apply(cur, omega, div_omega, grid))
        err = float(np.max(np.abs(new - cur)))
        cur = new
        if err <= tol * scale:
            break
    else:
        log.warning(
            "transport fixed point did not reach %.1e in %d iterations", tol, max_iter
        )
    return SpinorField(cur, grid), n_iter


def transport_step2(
    u: SpinorField, omega: ArrayR, pot: PotentialState, dt: float
) -> SpinorField:
    """Exact phase for the potential term: u <- exp(i (A.omega - V) dt) u."""
    phase_arg = omega[0] * pot.a[0] + omega[1] * pot.a[1] + omega[2] * pot.a[2] - pot.v
    return SpinorField(np.exp(1j * dt * phase_arg) * u.data, u.grid)


def polarized_amplitude(
    grid: GridSpec,
    phase: ArrayR | None,
    kind: str = "example32",
    chi=None,
    grad=None,
) -> ArrayC:
    """Amplitude profile polarised on the + branch at the phase gradient.

    kind="example32" evaluates the closed-form eigenvector field

        chi(xi) = ( (xi1^2+xi2^2) c,  -xi3 (xi1+i xi2) c,  0,  (xi1+i xi2)/2 )

    with xi = grad(phase) and c = (lambda0+1)/(2 |xi|^2) (the removable
    0/0 at xi = 0 is replaced by its ladder limit (1,0,0,0)).  Pass `grad`
    (a 3-sequence of fields or scalars) to evaluate at a known gradient
    instead of differentiating `phase`.
    kind="custom" broadcasts a caller-supplied 4-vector.
    """
    if kind == "custom":
        if chi is None:
            raise ValueError("kind='custom' needs the chi vector")
        chi = np.asarray(chi, dtype=np.complex128)
        out = np.empty((4,) + grid.n, dtype=np.complex128)
        out[:] = chi.reshape(4, 1, 1, 1)
        return out
    if kind != "example32":
        raise ValueError(f"unknown amplitude kind {kind!r}")

    if grad is not None:
        g = [np.broadcast_to(np.asarray(c, dtype=np.float64), grid.n) for c in grad]
    else:
        if phase is None:
            raise ValueError("need either the phase field or its gradient")
        g = spectral_gradient(np.asarray(phase, dtype=np.float64), grid)
    x1, x2, x3 = g
    q2 = x1 * x1 + x2 * x2
    s2 = q2 + x3 * x3
    lam = np.sqrt(1.0 + s2)
    safe = s2 > 1e-28
    fac = np.where(safe, (lam + 1.0) / (2.0 * np.where(safe, s2, 1.0)), 0.0)
    out = np.zeros((4,) + grid.n, dtype=np.complex128)
    out[0] = np.where(safe, q2 * fac, 1.0)
    out[1] = -x3 * (x1 + 1j * x2) * fac
    out[3] = 0.5 * (x1 + 1j * x2)
    return out


def make_wkb_state(
    grid: GridSpec, phi_init: ArrayR, amplitude: SpinorField | np.ndarray
) -> WkbState:
    """Assemble initial data: both phase sheets start from phi_init and the
    amplitude is split by the pointwise free projectors at grad(phi_init)."""
    if not isinstance(amplitude, SpinorField):
        amplitude = SpinorField(np.asarray(amplitude, dtype=np.complex128), grid)
    phi_init = np.broadcast_to(np.asarray(phi_init, dtype=np.float64), grid.n).copy()
    u_p = apply_projector(amplitude, +1, mode="phase_gradient", phase=phi_init)
    u_m = apply_projector(amplitude, -1, mode="phase_gradient", phase=phi_init)
    return WkbState(
        phi_p=phi_init.copy(),
        phi_m=phi_init.copy(),
        u_p=u_p,
        u_m=u_m,
        pot=PotentialState.zero(grid),
        time=0.0,
    )


def wkb_advance(state: WkbState, cfg: SimConfig) -> WkbState:
    """One step: phases by RK4, then transport step 1 (advection + wave
    potentials) and step 2 (potential phase), first-order composed.

    If the caustic metric of the advanced phases exceeds the configured
    threshold the state is returned unmodified except for the flag, so the
    caller can halt at the last smooth time.
    """
    grid = state.u_p.grid
    dt = cfg.dt
    v_ex = cfg.external.scalar_at(state.time, grid)

    phi_p = eiconal_step(state.phi_p, dt, +1, v_ex, grid)
    phi_m = eiconal_step(state.phi_m, dt, -1, v_ex, grid)

    probe = WkbState(phi_p, phi_m, state.u_p, state.u_m, state.pot, state.time)
    metric = caustic_metric(probe)
    if metric > cfg.caustic_threshold:
        out = state.copy()
        out.caustic_metric = metric
        out.caustic_flag = True
        return out

    omega_p_old = branch_velocity(state.phi_p, +1, grid)
    omega_m_old = branch_velocity(state.phi_m, -1, grid)
    omega_p_mid = branch_velocity(0.5 * (state.phi_p + phi_p), +1, grid)
    omega_m_mid = branch_velocity(0.5 * (state.phi_m + phi_m), -1, grid)
    omega_p_new = branch_velocity(phi_p, +1, grid)
    omega_m_new = branch_velocity(phi_m, -1, grid)

    u_p, _ = transport_step1(state.u_p, omega_p_mid, dt)
    u_m, _ = transport_step1(state.u_m, omega_m_mid, dt)

    rho0 = _amp_density(state.u_p) + _amp_density(state.u_m)
    rho1 = _amp_density(u_p) + _amp_density(u_m)
    jv0 = omega_p_old * _amp_density(state.u_p) + omega_m_old * _amp_density(state.u_m)
    jv1 = omega_p_new * _amp_density(u_p) + omega_m_new * _amp_density(u_m)

    v_hat, vt_hat = _cn_wave_update(
        dft(state.pot.v), dft(state.pot.v_t), dft(rho0), dft(rho1),
        grid, dt, delta=1.0, coeff=1.0,
    )
    a_hat, at_hat = _cn_wave_update(
        dft(state.pot.a), dft(state.pot.a_t), dft(jv0), dft(jv1),
        grid, dt, delta=1.0, coeff=1.0,
    )
    pot = PotentialState(
        idft(v_hat).real, idft(vt_hat).real, idft(a_hat).real, idft(at_hat).real, grid
    )

    u_p = transport_step2(u_p, omega_p_new, pot, dt)
    u_m = transport_step2(u_m, omega_m_new, pot, dt)

    return WkbState(
        phi_p, phi_m, u_p, u_m, pot,
        time=state.time + dt,
        caustic_metric=metric,
    )


def _amp_density(u: SpinorField) -> ArrayR:
    return np.sum(np.abs(u.data) ** 2, axis=0)


def wkb_reconstruct(state: WkbState, epsilon: float) -> SpinorField:
    """Oscillatory spinor u+ e^{i phi+/eps} + u- e^{i phi-/eps}."""
    data = state.u_p.data * np.exp(1j * state.phi_p / epsilon) + state.u_m.data * np.exp(
        1j * state.phi_m / epsilon
    )
    return SpinorField(data, state.u_p.grid)


def wkb_charge(state: WkbState) -> float:
    return total_charge(state.u_p) + total_charge(state.u_m)
