"""Periodic box discretisation and Fourier transform conventions.

Everything downstream (Dirac symbols, wave-equation updates, spectral
derivatives) is phrased in terms of the dual lattice of a rectangular box
with periodic boundary conditions, so the conventions are centralised here:

* forward DFT is unnormalised, the inverse carries the 1/(n1*n2*n3) factor
  (numpy/scipy default);
* mode ladder along each axis is k in {-n/2, ..., n/2 - 1} in FFT order,
  with dual variable xi = 2*pi*k / (b - a);
* multiplier symbols (|xi|^2, the Dirac symbol, ...) keep the Nyquist mode,
  but first-derivative ladders zero it so that gradients of real fields
  stay real.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft
from numpy.typing import NDArray

ArrayR = NDArray[np.float64]
ArrayC = NDArray[np.complex128]

_SPACE_AXES = (-3, -2, -1)

# Worker count handed to scipy.fft; module-level so the CLI can pin it for
# reproducible runs without threading it through every call site.
_fft_workers = os.cpu_count() or 1


def set_fft_workers(n: int) -> None:
    global _fft_workers
    if n < 1:
        raise ValueError(f"fft worker count must be >= 1, got {n}")
    _fft_workers = int(n)


def get_fft_workers() -> int:
    return _fft_workers


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid on a periodic box.

    bounds : ((a1, b1), (a2, b2), (a3, b3)) box extents per axis
    n      : (n1, n2, n3) grid points per axis, each even and >= 2
    """

    bounds: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    n: tuple[int, int, int]

    def __post_init__(self) -> None:
        if len(self.bounds) != 3 or len(self.n) != 3:
            raise ValueError("GridSpec is three-dimensional")
        for (a, b), m in zip(self.bounds, self.n):
            if not b > a:
                raise ValueError(f"degenerate box extent [{a}, {b}]")
            if m < 2 or m % 2 != 0:
                raise ValueError(f"grid size {m} must be even and >= 2")

    @cached_property
    def lengths(self) -> tuple[float, float, float]:
        return tuple(b - a for a, b in self.bounds)  # type: ignore[return-value]

    @cached_property
    def dx(self) -> tuple[float, float, float]:
        return tuple(L / m for L, m in zip(self.lengths, self.n))  # type: ignore[return-value]

    @cached_property
    def cell_volume(self) -> float:
        return self.dx[0] * self.dx[1] * self.dx[2]

    @cached_property
    def volume(self) -> float:
        return self.lengths[0] * self.lengths[1] * self.lengths[2]

    @cached_property
    def axes(self) -> tuple[ArrayR, ArrayR, ArrayR]:
        """Physical coordinates along each axis (left endpoints, no b)."""
        return tuple(
            a + np.arange(m) * d
            for (a, _), m, d in zip(self.bounds, self.n, self.dx)
        )  # type: ignore[return-value]

    @cached_property
    def x(self) -> tuple[ArrayR, ArrayR, ArrayR]:
        """Coordinates broadcast to rank 3: shapes (n1,1,1), (1,n2,1), (1,1,n3)."""
        x1, x2, x3 = self.axes
        return (
            x1.reshape(-1, 1, 1),
            x2.reshape(1, -1, 1),
            x3.reshape(1, 1, -1),
        )

    @cached_property
    def xi(self) -> tuple[ArrayR, ArrayR, ArrayR]:
        """Full dual ladders 2*pi*k/L in FFT order, broadcast to rank 3.

        Nyquist mode kept; use these inside multiplier symbols.
        """
        out = []
        for ax, (L, m) in enumerate(zip(self.lengths, self.n)):
            k = np.fft.fftfreq(m, d=1.0 / m)  # integers in FFT order
            xi = 2.0 * np.pi * k / L
            shape = [1, 1, 1]
            shape[ax] = m
            out.append(xi.reshape(shape))
        return tuple(out)  # type: ignore[return-value]

    @cached_property
    def xi_deriv(self) -> tuple[ArrayR, ArrayR, ArrayR]:
        """First-derivative ladders: like `xi` but with the Nyquist mode zeroed."""
        out = []
        for ax, xi in enumerate(self.xi):
            xi = xi.copy()
            idx = [slice(None)] * 3
            idx[ax] = self.n[ax] // 2
            xi[tuple(idx)] = 0.0
            out.append(xi)
        return tuple(out)  # type: ignore[return-value]

    @cached_property
    def xi_sq(self) -> ArrayR:
        """|xi|^2 on the full dual lattice, shape (n1, n2, n3)."""
        x1, x2, x3 = self.xi
        return x1 * x1 + x2 * x2 + x3 * x3


def make_grid(n, bounds=((-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5))) -> GridSpec:
    """Build a GridSpec; scalar `n` is broadcast to all three axes."""
    if np.isscalar(n):
        n = (int(n),) * 3
    else:
        n = tuple(int(m) for m in n)
    bounds = tuple((float(a), float(b)) for a, b in bounds)
    return GridSpec(bounds=bounds, n=n)  # type: ignore[arg-type]


def dft(f: np.ndarray) -> ArrayC:
    """Forward DFT over the trailing three axes (unnormalised)."""
    return scipy.fft.fftn(f, axes=_SPACE_AXES, workers=_fft_workers)


def idft(fhat: np.ndarray) -> ArrayC:
    """Inverse DFT over the trailing three axes (carries the 1/N factor)."""
    return scipy.fft.ifftn(fhat, axes=_SPACE_AXES, workers=_fft_workers)


def spectral_gradient(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Gradient of a periodic field by Fourier differentiation.

    Returns an array of shape (3,) + f.shape.  Real input gives real output
    (the Nyquist mode is dropped from the derivative ladders).
    """
    fhat = dft(f)
    out = np.empty((3,) + f.shape, dtype=np.complex128)
    for ax, xi in enumerate(grid.xi_deriv):
        out[ax] = idft(1j * xi * fhat)
    if np.isrealobj(f):
        return np.ascontiguousarray(out.real)
    return out


def spectral_divergence(vec: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Divergence of a periodic vector field of shape (3, n1, n2, n3)."""
    acc = None
    for ax, xi in enumerate(grid.xi_deriv):
        term = idft(1j * xi * dft(vec[ax]))
        acc = term if acc is None else acc + term
    if np.isrealobj(vec):
        return np.ascontiguousarray(acc.real)
    return acc
