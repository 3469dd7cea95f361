"""Spin-resolved Kapitza-Dirac scattering in elliptically polarized standing waves.

A spectral split-operator solver for the quasi-1D time-dependent Dirac
equation, time-independent ponderomotive mode models with closed-form
solutions, a classical Lorentz-force check, and a harness for frequency
fits, ellipticity sweeps and solver comparisons.  Atomic units
throughout.
"""

from .classical import (
    ClassicalState,
    averaged_longitudinal_force,
    lorentz_step,
    ponderomotive_potential,
)
from .dirac import Numerics, SpinorField, init_state, make_eigenstate, project, run, step
from .effective import (
    FrequencySet,
    ModeAmplitudes,
    analytic_amplitudes_corotating,
    analytic_probabilities_antirotating,
    analytic_probabilities_corotating,
    analytic_spin_corotating,
    analytic_spin_nonresonant,
    build_antirotating_matrix,
    build_corotating_matrix,
    build_nonresonant_matrix,
    evolve_modes,
    field_strength_window,
    frequencies,
)
from .fields import (
    CONSTANTS,
    FieldSample,
    LaserConfig,
    PhysicalConstants,
    Setup,
    derived_wave_numbers,
    total_fields,
    window,
)
from .fitting import FitResult, fit_cos_squared, fit_product_cos
from .sweeps import ComparisonReport, SweepPoint, compare, effective_series, sweep_eta
from .timeseries import TimeSeries, export, read_csv

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "ClassicalState",
    "ComparisonReport",
    "FieldSample",
    "FitResult",
    "FrequencySet",
    "LaserConfig",
    "ModeAmplitudes",
    "Numerics",
    "PhysicalConstants",
    "Setup",
    "SpinorField",
    "SweepPoint",
    "TimeSeries",
    "analytic_amplitudes_corotating",
    "analytic_probabilities_antirotating",
    "analytic_probabilities_corotating",
    "analytic_spin_corotating",
    "analytic_spin_nonresonant",
    "averaged_longitudinal_force",
    "build_antirotating_matrix",
    "build_corotating_matrix",
    "build_nonresonant_matrix",
    "compare",
    "derived_wave_numbers",
    "effective_series",
    "evolve_modes",
    "export",
    "field_strength_window",
    "fit_cos_squared",
    "fit_product_cos",
    "frequencies",
    "init_state",
    "lorentz_step",
    "make_eigenstate",
    "ponderomotive_potential",
    "project",
    "read_csv",
    "run",
    "step",
    "sweep_eta",
    "total_fields",
    "window",
]
