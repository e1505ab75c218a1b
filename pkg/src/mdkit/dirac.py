"""Dirac matrix algebra and Fourier-multiplier propagators.

The symbol of the free operator is D0(eta) = alpha . eta + beta with
eigenvalues +/- lambda0(eta), lambda0(eta) = sqrt(1 + |eta|^2).  Because
D0(eta)^2 = lambda0^2 * I, every function of the symbol reduces to a linear
combination of I and D0, which is what all the closed forms below exploit:

    exp(-i tau D0) = cos(tau lambda0) I - i sin(tau lambda0)/lambda0 * D0
    projector on the +/- branch: (I +/- D0/lambda0) / 2

Applications never materialise 4x4 matrices on the grid; the mixing is
written out componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import SpinorField
from .grid import ArrayC, ArrayR, GridSpec, dft, idft, spectral_gradient

PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=np.complex128,
)

ALPHA = np.zeros((3, 4, 4), dtype=np.complex128)
for _k in range(3):
    ALPHA[_k, :2, 2:] = PAULI[_k]
    ALPHA[_k, 2:, :2] = PAULI[_k]

BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)


def dirac_matrix(eta: np.ndarray) -> ArrayC:
    """Dense 4x4 symbol D0(eta) for a single frequency vector."""
    e1, e2, e3 = (complex(c) for c in eta)
    return e1 * ALPHA[0] + e2 * ALPHA[1] + e3 * ALPHA[2] + BETA


def lambda0(eta) -> ArrayR:
    """Relativistic dispersion sqrt(1 + |eta|^2); eta is a 3-sequence of arrays."""
    e1, e2, e3 = eta
    return np.sqrt(1.0 + e1 * e1 + e2 * e2 + e3 * e3)


def apply_alpha_dot(a, psi: np.ndarray) -> ArrayC:
    """(alpha . a) psi written componentwise; a is a 3-sequence of fields."""
    a1, a2, a3 = a
    p1, p2, p3, p4 = psi
    out = np.empty_like(psi, dtype=np.complex128)
    am = a1 - 1j * a2
    ap = a1 + 1j * a2
    out[0] = a3 * p3 + am * p4
    out[1] = ap * p3 - a3 * p4
    out[2] = a3 * p1 + am * p2
    out[3] = ap * p1 - a3 * p2
    return out


def apply_dirac_symbol(eta, psi: np.ndarray) -> ArrayC:
    """(alpha . eta + beta) psi componentwise."""
    out = apply_alpha_dot(eta, psi)
    out[0] += psi[0]
    out[1] += psi[1]
    out[2] -= psi[2]
    out[3] -= psi[3]
    return out


def positive_eigenvector(xi) -> np.ndarray:
    """Unnormalised eigenvector of D0(xi) with eigenvalue +lambda0(xi).

    chi = (xi3, xi1 + i xi2, lambda0 - 1, 0); degenerates to zero at xi = 0,
    so callers that allow xi -> 0 should use `polarized_amplitude` instead.
    """
    x1, x2, x3 = (float(c) for c in xi)
    lam = float(lambda0((x1, x2, x3)))
    return np.array([x3, x1 + 1j * x2, lam - 1.0, 0.0], dtype=np.complex128)


def current_density(psi: SpinorField) -> ArrayR:
    """Vector density <psi, alpha^k psi>, shape (3, n1, n2, n3), real."""
    p1, p2, p3, p4 = psi.data
    c14 = np.conj(p1) * p4
    c23 = np.conj(p2) * p3
    out = np.empty((3,) + psi.grid.n, dtype=np.float64)
    out[0] = 2.0 * (c14.real + c23.real)
    out[1] = 2.0 * (c14.imag - c23.imag)
    out[2] = 2.0 * ((np.conj(p1) * p3).real - (np.conj(p2) * p4).real)
    return out


def charge_density(psi: SpinorField) -> ArrayR:
    """|psi|^2 summed over components."""
    return np.sum(np.abs(psi.data) ** 2, axis=0)


@dataclass(frozen=True)
class DiracSymbolTables:
    """Precomputed multiplier tables for the free-flow step.

    Holds cos(theta) and sin(theta)/lambda0 with
    theta = dt * lambda0(eps*delta*xi) / (eps*delta^2), plus the scaled
    frequency ladders eta = eps*delta*xi, so one step costs a forward and an
    inverse transform and a handful of array multiplies.
    """

    grid: GridSpec
    dt: float
    epsilon: float
    delta: float
    eta: tuple[ArrayR, ArrayR, ArrayR]
    lam: ArrayR
    cos_theta: ArrayR
    sinc_theta: ArrayR


@lru_cache(maxsize=32)
def symbol_tables(
    grid: GridSpec, dt: float, epsilon: float, delta: float
) -> DiracSymbolTables:
    s = epsilon * delta
    eta = tuple(s * xi for xi in grid.xi)
    lam = lambda0(eta)
    theta = dt * lam / (epsilon * delta * delta)
    return DiracSymbolTables(
        grid=grid,
        dt=dt,
        epsilon=epsilon,
        delta=delta,
        eta=eta,  # type: ignore[arg-type]
        lam=lam,
        cos_theta=np.cos(theta),
        sinc_theta=np.sin(theta) / lam,
    )


def step1_propagator(psi: SpinorField, tables: DiracSymbolTables) -> SpinorField:
    """Exact free flow over one step: exp(-i dt D0(eps delta xi)/(eps delta^2))."""
    psihat = dft(psi.data)
    dpsi = apply_dirac_symbol(tables.eta, psihat)
    out = tables.cos_theta * psihat - 1j * tables.sinc_theta * dpsi
    return SpinorField(idft(out), psi.grid)


def _project_hat(psihat: ArrayC, eta, sign: int) -> ArrayC:
    lam = lambda0(eta)
    dpsi = apply_dirac_symbol(eta, psihat)
    return 0.5 * (psihat + sign * dpsi / lam)


def apply_projector(
    psi: SpinorField,
    sign: int,
    mode: str = "spectral",
    scale: float = 1.0,
    phase: ArrayR | None = None,
) -> SpinorField:
    """Project onto an energy branch of the Dirac symbol.

    mode="spectral": multiplier (I + sign * D0(scale*xi)/lambda0)/2 in
    Fourier space.  mode="phase_gradient": pointwise projector at
    eta(x) = grad(phase), used to polarise WKB amplitudes.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if mode == "spectral":
        eta = tuple(scale * xi for xi in psi.grid.xi)
        out = idft(_project_hat(dft(psi.data), eta, sign))
        return SpinorField(out, psi.grid)
    if mode == "phase_gradient":
        if phase is None:
            raise ValueError("phase_gradient mode needs the phase field")
        eta = spectral_gradient(np.asarray(phase, dtype=np.float64), psi.grid)
        lam = lambda0(eta)
        dpsi = apply_dirac_symbol(eta, psi.data)
        return SpinorField(0.5 * (psi.data + sign * dpsi / lam), psi.grid)
    raise ValueError(f"unknown projector mode {mode!r}")


def nr_projector_split(
    psi: SpinorField,
    delta: float,
    t: float | None = None,
    limit: bool = False,
) -> tuple[SpinorField, SpinorField]:
    """Split into electron/positron branches of D0(delta*xi).

    Returns (psi_e, psi_p).  When `t` is given the fast rest-energy phase is
    removed: psi_e -> exp(+i t/delta^2) Pi_e psi and psi_p with the opposite
    sign, which makes the branches directly comparable with slow envelopes.
    With limit=True the formal delta -> 0 projectors (I +/- beta)/2 are used
    and no phase removal is allowed.
    """
    if limit:
        if t is not None:
            raise ValueError("phase removal is undefined in the delta -> 0 limit")
        pe = np.zeros_like(psi.data)
        pp = np.zeros_like(psi.data)
        pe[:2] = psi.data[:2]
        pp[2:] = psi.data[2:]
        return SpinorField(pe, psi.grid), SpinorField(pp, psi.grid)
    if delta <= 0.0:
        raise ValueError(f"delta must be positive (or pass limit=True), got {delta}")
    psi_e = apply_projector(psi, +1, scale=delta)
    psi_p = apply_projector(psi, -1, scale=delta)
    if t is not None:
        ph = np.exp(1j * t / (delta * delta))
        psi_e = SpinorField(psi_e.data * ph, psi.grid)
        psi_p = SpinorField(psi_p.data * np.conj(ph), psi.grid)
    return psi_e, psi_p
