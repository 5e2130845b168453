"""Spectral simulator for position-measurement-induced collapse states in an infinite well."""
from .errors import ConfigError, DomainError, PmicError, ValidationError
from .spectral import (
    CollapseProfile,
    ModalCoefficients,
    SlitAperture,
    WellConfig,
    coefficients_by_quadrature,
    eigenenergy,
    eigenfunction,
    parseval_deficit,
    slit_coefficients,
)
from .propagator import (
    DensityField,
    SpaceTimeGrid,
    WaveSlice,
    amplitude_at,
    carpet,
    density_slice,
    reduced_phase,
    slice_at_fraction,
    symmetric_grid,
)
from .screen import BeamConfig, distance_of_time, revival_distance, screen_pattern, time_of_flight

__version__ = "0.1.0"
