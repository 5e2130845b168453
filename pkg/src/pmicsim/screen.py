"""Slit-to-screen geometry: a screen at distance D sees the transverse density at
the flight time t = t_M + D / v_x.

The longitudinal plane wave has unit modulus, so only v_x = (hbar/m) k_x
enters; its energy and normalisation are not kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError
from .propagator import density_slice
from .spectral import ModalCoefficients, WellConfig


@dataclass(frozen=True)
class BeamConfig:
    k_x: float
    hbar_over_m: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k_x) and self.k_x > 0):
            raise ValidationError(f"k_x must be positive, got {self.k_x}")
        if not (math.isfinite(self.hbar_over_m) and self.hbar_over_m > 0):
            raise ValidationError(f"hbar_over_m must be positive, got {self.hbar_over_m}")

    @property
    def v_x(self) -> float:
        return self.hbar_over_m * self.k_x


def time_of_flight(D: float, beam: BeamConfig, t_measure: float = 0.0) -> float:
    if not D >= 0:
        raise DomainError(f"screen distance must be >= 0, got {D}")
    return t_measure + D / beam.v_x


def distance_of_time(t: float, beam: BeamConfig, t_measure: float = 0.0) -> float:
    if not t >= t_measure:
        raise DomainError(f"time {t} precedes the measurement time {t_measure}")
    return (t - t_measure) * beam.v_x


def revival_distance(beam: BeamConfig, well: WellConfig) -> float:
    """D_T = v_x T = 4 k_x L^2 / pi; with L = 1 this is 4 hbar k_x / (pi m)."""
    if beam.hbar_over_m != well.hbar_over_m:
        raise ValidationError("beam and well disagree on hbar/m")
    return beam.v_x * well.revival_time()


def screen_pattern(coeffs: ModalCoefficients, well: WellConfig, beam: BeamConfig, y, D: float, *, workers=1):
    """Transverse density on a screen at distance D."""
    return density_slice(coeffs, well, y, time_of_flight(D, beam, well.t_measure), workers=workers).density
