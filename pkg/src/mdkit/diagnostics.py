"""Run-time diagnostics: exact reference solution, conserved quantities,
error norms and the time-series record written next to every run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dirac import lambda0, positive_eigenvector
from .fields import PotentialState, SpinorField, total_charge
from .grid import ArrayR, GridSpec, dft


def plane_wave_frequency(grid: GridSpec, modes: Sequence[int]) -> tuple[float, ...]:
    """Frequency vector 2*pi*k/L for an integer mode triple."""
    return tuple(
        2.0 * np.pi * k / L for k, L in zip(modes, grid.lengths)
    )


def exact_plane_wave(
    grid: GridSpec, t: float, modes: Sequence[int] = (1, 2, 3)
) -> tuple[SpinorField, PotentialState]:
    """Closed-form plane-wave solution of the coupled system at eps = delta = 1.

    The spinor is a unit-density travelling wave polarised on the positive
    branch; the self-consistent potentials are the spatially uniform fields
    V = t^2/2 and A = t^2 xi/(2 lambda) driven by the constant densities.
    It solves the full system only when the prescribed background exactly
    cancels these potentials (see the matching preset).
    """
    xi = plane_wave_frequency(grid, modes)
    lam = float(lambda0(xi))
    chi = positive_eigenvector(xi)
    norm = np.sqrt(2.0 * (1.0 + np.dot(xi, xi) - lam))
    x1, x2, x3 = grid.x
    carrier = np.exp(1j * (xi[0] * x1 + xi[1] * x2 + xi[2] * x3 - t * lam))
    data = (chi / norm).reshape(4, 1, 1, 1) * carrier
    psi = SpinorField(np.ascontiguousarray(data), grid)

    n = grid.n
    pot = PotentialState.zero(grid)
    pot.v = np.full(n, 0.5 * t * t)
    pot.v_t = np.full(n, float(t))
    for k in range(3):
        pot.a[k] = 0.5 * t * t * xi[k] / lam
        pot.a_t[k] = t * xi[k] / lam
    return psi, pot


def gauge_residual(
    pot: PotentialState, delta: float, include_mean: bool = False
) -> float:
    """Max over modes of |delta d_t V-hat + i xi . A-hat|, normalised.

    The normalisation is max(1, max_k |V-hat|).  The xi = 0 mode is excluded
    by default: with a non-zero net charge the zero mode of d_t V grows
    linearly in time for every solution of the wave system, so including it
    only measures the box charge, not gauge drift.
    """
    vt_hat = dft(pot.v_t)
    res = delta * vt_hat
    for k, xi in enumerate(pot.grid.xi):
        res = res + 1j * xi * dft(pot.a[k])
    res = np.abs(res)
    if not include_mean:
        res[0, 0, 0] = 0.0
    scale = max(1.0, float(np.max(np.abs(dft(pot.v)))))
    return float(res.max()) / scale


def _as_data(f) -> np.ndarray:
    return f.data if isinstance(f, SpinorField) else np.asarray(f)


def error_norms(a, b) -> dict[str, float]:
    """Discrete errors between a numerical field and a reference.

    l2_rel : relative l2 error, ||a - b|| / ||b|| (inf if the reference
             vanishes); linf_abs : grid max of the pointwise modulus of the
             difference (components combined in quadrature).
    """
    da, db = _as_data(a), _as_data(b)
    if da.shape != db.shape:
        raise ValueError(f"shape mismatch {da.shape} vs {db.shape}")
    diff = da - db
    comp_axes = tuple(range(diff.ndim - 3))
    point_sq = np.sum(np.abs(diff) ** 2, axis=comp_axes) if comp_axes else np.abs(diff) ** 2
    ref_sq = float(np.sum(np.abs(db) ** 2))
    l2 = float(np.sqrt(np.sum(point_sq) / ref_sq)) if ref_sq > 0.0 else float("inf")
    return {"l2_rel": l2, "linf_abs": float(np.sqrt(point_sq.max()))}


def projector_density(psi: SpinorField, sign: int, scale: float = 1.0) -> ArrayR:
    """|Pi_sign psi|^2 on the grid (spectral projector at scale*xi)."""
    from .dirac import apply_projector

    proj = apply_projector(psi, sign, scale=scale)
    return np.sum(np.abs(proj.data) ** 2, axis=0)


_BASE_COLUMNS = ("t", "charge", "gauge_residual", "l2_error", "linf_error")


@dataclass
class TimeSeries:
    """Per-step scalar diagnostics with a fixed, CSV-stable column set."""

    extra_columns: tuple[str, ...] = ()
    rows: list[dict[str, float]] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return _BASE_COLUMNS + self.extra_columns

    def add(
        self,
        t: float,
        charge: float,
        gauge_residual: float = float("nan"),
        l2_error: float = float("nan"),
        linf_error: float = float("nan"),
        **extras: float,
    ) -> None:
        row = {
            "t": float(t),
            "charge": float(charge),
            "gauge_residual": float(gauge_residual),
            "l2_error": float(l2_error),
            "linf_error": float(linf_error),
        }
        for name in self.extra_columns:
            row[name] = float(extras.pop(name, float("nan")))
        if extras:
            raise ValueError(f"unknown diagnostic columns: {sorted(extras)}")
        self.rows.append(row)

    def column(self, name: str) -> list[float]:
        return [row[name] for row in self.rows]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                # repr gives the shortest string that round-trips float64
                writer.writerow([repr(row[c]) for c in self.columns])

    @classmethod
    def read_csv(cls, path) -> "TimeSeries":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header[: len(_BASE_COLUMNS)]) != _BASE_COLUMNS:
                raise ValueError(f"unexpected time-series header: {header}")
            out = cls(extra_columns=tuple(header[len(_BASE_COLUMNS):]))
            for line in reader:
                out.rows.append(
                    {name: float(val) for name, val in zip(header, line)}
                )
        return out
