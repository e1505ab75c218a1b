"""Offline plotting for simulation field dumps and sweep CSVs.

Reads the self-describing ``MDKIT1`` binary dump format and the sweep CSV
files produced by the simulation command line, and renders static figures:
heatmap slices of densities, spinor components, and potentials, plus
log-log convergence plots with fitted orders.  The package depends only on
the file formats, not on the code that wrote them.
"""

from .io import DumpRecord, load_dump
from .plots import plot_convergence, plot_slice, slice_quantity

__all__ = [
    "DumpRecord",
    "load_dump",
    "plot_convergence",
    "plot_slice",
    "slice_quantity",
]

__version__ = "0.1.0"
