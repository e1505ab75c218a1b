"""Figure rendering: plane slices of field dumps and convergence plots.

All figures are written straight to image files through the Agg canvas;
nothing here opens a window or touches global matplotlib state.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .io import DumpRecord

QUANTITIES = ("density", "component-re", "component-im", "potential")

_RESOLUTION_COLUMNS = ("h", "dt", "dx")


def _plane_index(record: DumpRecord, plane: float) -> int:
    lo, hi = record.bounds[2]
    if not lo <= plane <= hi:
        raise ValueError(f"plane x3={plane:g} is outside the grid bounds [{lo}, {hi}]")
    n3 = record.n[2]
    return int(round((plane - lo) / (hi - lo) * n3)) % n3


def _component_index(record: DumpRecord, component: int | None) -> int:
    index = 0 if component is None else component
    if not 0 <= index < record.components:
        raise ValueError(
            f"component index {index} is out of range for a "
            f"{record.components}-component field"
        )
    return index


def slice_quantity(
    record: DumpRecord,
    plane: float = 0.0,
    quantity: str = "density",
    component: int | None = None,
) -> np.ndarray:
    """2-D array of ``quantity`` on the grid plane nearest to x3=``plane``.

    quantity "density" with component=None sums |f_c|^2 over all
    components; with a component it is that component's |f_c|^2.
    "component-re"/"component-im" take the real/imaginary part and
    "potential" the real value of one component (default the first).
    The result is indexed [i1, i2].
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    k = _plane_index(record, plane)
    if quantity == "density" and component is None:
        cube = np.sum(np.abs(record.data) ** 2, axis=0)
    else:
        field = record.data[_component_index(record, component)]
        if quantity == "density":
            cube = np.abs(field) ** 2
        elif quantity == "component-re":
            cube = field.real
        elif quantity == "component-im":
            cube = field.imag
        else:  # potential
            cube = field.real
    return np.ascontiguousarray(cube[:, :, k], dtype=float)


def plot_slice(
    record: DumpRecord,
    out,
    plane: float = 0.0,
    quantity: str = "density",
    component: int | None = None,
    cmap: str = "viridis",
) -> Path:
    """Render one x3=``plane`` slice of a dump as a heatmap image file."""
    values = slice_quantity(record, plane, quantity, component)
    (lo1, hi1), (lo2, hi2) = record.bounds[0], record.bounds[1]

    fig = Figure(figsize=(5.6, 4.4))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    image = ax.imshow(
        values.T,
        origin="lower",
        extent=(lo1, hi1, lo2, hi2),
        cmap=cmap,
        interpolation="nearest",
        aspect="auto",
    )
    label = quantity if component is None else f"{quantity}[{component}]"
    ax.set_xlabel("$x_1$")
    ax.set_ylabel("$x_2$")
    ax.set_title(f"{record.name}: {label} at $x_3$={plane:g}, t={record.time:g}")
    fig.colorbar(image, ax=ax, label=label)
    fig.tight_layout()

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return out


def _read_sweep(path) -> tuple[str, np.ndarray, dict[str, np.ndarray]]:
    """Parse one sweep CSV into (resolution column name, values, error columns)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, data = rows[0], rows[1:]
    if len(data) < 2:
        raise ValueError(
            f"{path}: need at least 2 rows to fit a convergence order, got {len(data)}"
        )
    res_col = next((c for c in _RESOLUTION_COLUMNS if c in header), None)
    if res_col is None:
        if len(header) < 2:
            raise ValueError(f"{path}: no resolution column found in {header}")
        res_col = header[1]
    table = {
        name: np.array([float(row[i]) for row in data])
        for i, name in enumerate(header)
    }
    resolution = table[res_col]
    steps = np.diff(resolution)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError(f"{path}: resolution column {res_col!r} is not monotone")
    error_cols = [c for c in header if "error" in c]
    if not error_cols:
        after = header.index(res_col) + 1
        if after >= len(header):
            raise ValueError(f"{path}: no error column found in {header}")
        error_cols = [header[after]]
    return res_col, resolution, {c: table[c] for c in error_cols}


def plot_convergence(csv_paths, out) -> list[dict]:
    """Log-log error vs resolution for one or more sweep CSVs.

    Each error column gets a line with its least-squares slope in the
    legend; the fits are also returned as
    ``[{"file", "column", "slope"}, ...]``.
    """
    if isinstance(csv_paths, (str, Path)):
        csv_paths = [csv_paths]
    if not csv_paths:
        raise ValueError("no CSV files given")

    fig = Figure(figsize=(5.6, 4.4))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)

    fits: list[dict] = []
    res_names = set()
    for path in csv_paths:
        res_col, resolution, errors = _read_sweep(path)
        res_names.add(res_col)
        for column, values in errors.items():
            usable = (
                np.isfinite(resolution) & np.isfinite(values)
                & (resolution > 0) & (values > 0)
            )
            if usable.sum() < 2:
                raise ValueError(
                    f"{path}: column {column!r} has fewer than 2 positive finite values"
                )
            slope = float(
                np.polyfit(np.log(resolution[usable]), np.log(values[usable]), 1)[0]
            )
            fits.append({"file": str(path), "column": column, "slope": slope})
            ax.loglog(
                resolution[usable],
                values[usable],
                marker="o",
                label=f"{Path(path).stem}: {column} (slope {slope:.2f})",
            )

    ax.set_xlabel(res_names.pop() if len(res_names) == 1 else "resolution")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return fits
