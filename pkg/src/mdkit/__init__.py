"""Spectral solvers for the periodic Maxwell-Dirac system across its
semi-classical and non-relativistic scaling regimes."""

from .diagnostics import (
    TimeSeries,
    error_norms,
    exact_plane_wave,
    gauge_residual,
    projector_density,
)
from .dirac import (
    ALPHA,
    BETA,
    DiracSymbolTables,
    apply_projector,
    charge_density,
    current_density,
    dirac_matrix,
    lambda0,
    nr_projector_split,
    positive_eigenvector,
    step1_propagator,
    symbol_tables,
)
from .dumps import read_dump, write_dump
from .experiments import RunResult, compare_regimes, convergence_sweep, run_experiment
from .fields import (
    ExternalFields,
    PotentialState,
    SimConfig,
    SpinorField,
    gaussian_spinor,
    total_charge,
)
from .grid import (
    GridSpec,
    dft,
    idft,
    make_grid,
    set_fft_workers,
    spectral_divergence,
    spectral_gradient,
)
from .md import MdState, advance, gauge_consistent_init, step1, step2
from .presets import PRESET_NAMES, Preset, make_preset
from .sp import SpState, sp_advance, sp_init, sp_step1, sp_step2
from .wkb import (
    WkbState,
    caustic_metric,
    eiconal_rhs,
    eiconal_step,
    make_wkb_state,
    polarized_amplitude,
    transport_step1,
    transport_step2,
    wkb_advance,
    wkb_charge,
    wkb_reconstruct,
)

__version__ = "0.1.0"
