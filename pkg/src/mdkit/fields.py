"""State containers and common initial data.

A spinor field is stored as a complex array of shape (4, n1, n2, n3) with
the component axis first; potentials as real arrays (n1, n2, n3) for the
scalar and (3, n1, n2, n3) for the vector, together with their time
derivatives (the wave equations are second order in time).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import ArrayC, ArrayR, GridSpec

# External potentials are callables of (t, (x1, x2, x3)) returning a field
# on the grid; the coordinate arrays come broadcast from GridSpec.x.
ScalarExternal = Callable[[float, tuple[ArrayR, ArrayR, ArrayR]], ArrayR]
VectorExternal = Callable[[float, tuple[ArrayR, ArrayR, ArrayR]], ArrayR]


@dataclass
class SpinorField:
    """Four-component complex field on a periodic grid."""

    data: ArrayC
    grid: GridSpec

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (4,) + self.grid.n:
            raise ValueError(
                f"spinor shape {self.data.shape} does not match grid {self.grid.n}"
            )

    def copy(self) -> "SpinorField":
        return SpinorField(self.data.copy(), self.grid)

    @classmethod
    def zero(cls, grid: GridSpec) -> "SpinorField":
        return cls(np.zeros((4,) + grid.n, dtype=np.complex128), grid)


@dataclass
class PotentialState:
    """Scalar and vector wave-equation fields with time derivatives."""

    v: ArrayR
    v_t: ArrayR
    a: ArrayR
    a_t: ArrayR
    grid: GridSpec

    def __post_init__(self) -> None:
        n = self.grid.n
        for name, arr, shape in (
            ("v", self.v, n),
            ("v_t", self.v_t, n),
            ("a", self.a, (3,) + n),
            ("a_t", self.a_t, (3,) + n),
        ):
            arr = np.asarray(arr, dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            setattr(self, name, arr)

    def copy(self) -> "PotentialState":
        return PotentialState(
            self.v.copy(), self.v_t.copy(), self.a.copy(), self.a_t.copy(), self.grid
        )

    @classmethod
    def zero(cls, grid: GridSpec) -> "PotentialState":
        n = grid.n
        return cls(
            np.zeros(n), np.zeros(n), np.zeros((3,) + n), np.zeros((3,) + n), grid
        )


@dataclass
class ExternalFields:
    """Prescribed background potentials, possibly time dependent."""

    v_ex: Optional[ScalarExternal] = None
    a_ex: Optional[VectorExternal] = None

    @classmethod
    def none(cls) -> "ExternalFields":
        return cls(None, None)

    def scalar_at(self, t: float, grid: GridSpec) -> Optional[ArrayR]:
        if self.v_ex is None:
            return None
        return np.broadcast_to(self.v_ex(t, grid.x), grid.n)

    def vector_at(self, t: float, grid: GridSpec) -> Optional[ArrayR]:
        if self.a_ex is None:
            return None
        parts = self.a_ex(t, grid.x)
        return np.stack(
            [
                np.broadcast_to(np.asarray(p, dtype=np.float64), grid.n)
                for p in parts
            ]
        )


_SPLITTINGS = ("strang", "first_order")


@dataclass
class SimConfig:
    """Scaling parameters and time-stepping controls for one run."""

    grid: GridSpec
    epsilon: float = 1.0
    delta: float = 1.0
    dt: float = 1.0 / 128.0
    t_final: float = 1.0
    splitting: str = "strang"
    external: ExternalFields = field(default_factory=ExternalFields.none)
    dealias: bool = False
    caustic_threshold: float = 50.0

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < 0.0:
            raise ValueError(f"t_final must be non-negative, got {self.t_final}")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"t_final = {self.t_final} is not an integer number of steps of dt = {self.dt}"
            )
        if self.splitting not in _SPLITTINGS:
            raise ValueError(
                f"splitting must be one of {_SPLITTINGS}, got {self.splitting!r}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


def gaussian_spinor(
    grid: GridSpec,
    center: Sequence[float] = (0.0, 0.0, 0.0),
    width: float = 1.0 / 16.0,
    chi: Sequence[complex] | np.ndarray = (1.0, 0.0, 0.0, 0.0),
    phase: Optional[ArrayR] = None,
    epsilon: float = 1.0,
) -> SpinorField:
    """Gaussian envelope times a (possibly space-dependent) polarisation.

    psi(x) = chi * exp(-|x - center|^2 / (4 width^2)) * exp(i phase(x) / epsilon)

    `chi` is either a length-4 vector or an already-broadcast (4, n1, n2, n3)
    array.  The result is intentionally not renormalised.
    """
    if width <= 0.0:
        raise ValueError(f"width must be positive, got {width}")
    x1, x2, x3 = grid.x
    r2 = (x1 - center[0]) ** 2 + (x2 - center[1]) ** 2 + (x3 - center[2]) ** 2
    envelope = np.exp(-r2 / (4.0 * width * width)).astype(np.complex128)
    if phase is not None:
        envelope = envelope * np.exp(1j * np.asarray(phase) / epsilon)

    chi = np.asarray(chi, dtype=np.complex128)
    if chi.shape == (4,):
        data = chi.reshape(4, 1, 1, 1) * envelope
    elif chi.shape == (4,) + grid.n:
        data = chi * envelope
    else:
        raise ValueError(f"chi must have shape (4,) or (4, n1, n2, n3), got {chi.shape}")
    return SpinorField(np.ascontiguousarray(data), grid)


def total_charge(psi: SpinorField) -> float:
    """Discrete charge: sum over the grid of |psi|^2 times the cell volume."""
    return float(np.sum(np.abs(psi.data) ** 2).real * psi.grid.cell_volume)
