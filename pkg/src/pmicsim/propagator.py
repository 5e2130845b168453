"""Unitary evolution of a modal expansion and density evaluation on space-time grids.

Mode phases are handled as fractions of a turn, frac(n^2 * tau) with
tau = (t - t_M)/T, so rational fractions of the revival time stay exact no
matter how large n is. Position dependence comes from a rotation recurrence
in the compiled kernel, re-seeded every ``_kernels.BLOCK`` modes.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import _kernels as K
from .errors import DomainError, ValidationError
from .spectral import ModalCoefficients, WellConfig

CHUNK = 64
DEFAULT_SLICE_POINTS = 4096
DEFAULT_CARPET_SHAPE = (1024, 1024)


@njit(cache=True)
def _phase_turns(n, tau, out):
    for k in range(n.shape[0]):
        m = float(n[k]) * float(n[k])
        out[k] = K.frac_of_product(m, tau)


def reduced_phase(n, tau):
    """2*pi*frac(n^2 * tau), in [0, 2*pi).

    The product n^2*tau is formed in two-term arithmetic, so the fractional
    part survives even when n^2*tau is ~1e10.
    """
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(arr < 1):
        raise DomainError("mode index must be >= 1")
    if np.any(arr.astype(float) ** 2 > 2.0**53):
        raise DomainError("n^2 exceeds the exactly representable integer range")
    turns = np.empty(arr.shape[0])
    _phase_turns(arr, float(tau), turns)
    out = np.minimum(K.TWO_PI * turns, np.nextafter(K.TWO_PI, 0.0))
    return float(out[0]) if np.ndim(n) == 0 else out


def phase_fraction(well: WellConfig, t: float) -> float:
    """Elapsed time since collapse as a fraction of the revival time."""
    if not t >= well.t_measure:
        raise DomainError(f"time {t} precedes the measurement time {well.t_measure}")
    return (t - well.t_measure) / well.revival_time()


def symmetric_grid(L: float, points: int = DEFAULT_SLICE_POINTS) -> np.ndarray:
    """Uniform samples spanning [-L/2, L/2], exactly antisymmetric about 0."""
    if points < 2:
        raise ValidationError("a grid needs at least 2 points")
    i = np.arange(points, dtype=float)
    return L * ((2.0 * i - (points - 1)) / (2.0 * (points - 1)))


@dataclass(frozen=True)
class SpaceTimeGrid:
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=float)
        t = np.ascontiguousarray(self.t, dtype=float)
        if y.ndim != 1 or y.size == 0 or t.ndim != 1 or t.size == 0:
            raise ValidationError("grid axes must be non-empty vectors")
        if np.any(np.diff(y) <= 0):
            raise ValidationError("y samples must be strictly increasing")
        if np.any(np.diff(t) < 0):
            raise ValidationError("t samples must be nondecreasing")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    @classmethod
    def uniform(cls, well: WellConfig, y_points: int, t_points: int, t_end: float | None = None):
        """Full-well y axis and t from t_M to ``t_end`` (default t_M + T) inclusive."""
        if t_end is None:
            t_end = well.t_measure + well.revival_time()
        if t_points == 1:
            t = np.array([well.t_measure])
        else:
            t = well.t_measure + (t_end - well.t_measure) * (np.arange(t_points) / (t_points - 1))
        return cls(symmetric_grid(well.L, y_points), t)

    def check(self, well: WellConfig) -> None:
        if not well.contains(self.y):
            raise DomainError("grid has y samples outside the well")
        if self.t[0] < well.t_measure:
            raise DomainError("grid has times before the measurement time")


@dataclass(frozen=True)
class WaveSlice:
    t: float
    y: np.ndarray
    amplitude: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.amplitude.real**2 + self.amplitude.imag**2


@dataclass(frozen=True)
class DensityField:
    """|Psi|^2 with rows indexed by ``grid.t`` and columns by ``grid.y``."""

    values: np.ndarray
    grid: SpaceTimeGrid

    def row(self, r: int) -> np.ndarray:
        return self.values[r]


def _weights(coeffs: ModalCoefficients, L: float, tau: float):
    c = coeffs.values
    scale = math.sqrt(2.0 / L)
    n = c.shape[0]
    b_re = np.empty(n)
    b_im = np.empty(n)
    K.mode_weights(np.ascontiguousarray(c.real), float(tau), scale, b_re, b_im)
    if not coeffs.is_real:
        # i*c_n contributes with the phase rotated by a quarter turn
        a_re = np.empty(n)
        a_im = np.empty(n)
        K.mode_weights(np.ascontiguousarray(c.imag), float(tau), scale, a_re, a_im)
        b_re = b_re - a_im
        b_im = b_im + a_re
    return b_re, b_im


def _series_row(b_re, b_im, w, out, drift, method):
    """Fill complex ``out`` with the series at reduced positions ``w``, chunk by chunk."""
    re = np.empty(w.shape[0])
    im = np.empty(w.shape[0])
    for s in range(0, w.shape[0], CHUNK):
        sl = slice(s, s + CHUNK)
        if method == "recurrence":
            K.series_chunk(b_re, b_im, w[sl], re[sl], im[sl], drift[sl])
        else:
            K.series_chunk_direct(b_re, b_im, w[sl], re[sl], im[sl])
    out.real = re
    out.imag = im


def _check_method(method):
    if method not in ("recurrence", "direct"):
        raise ValidationError(f"unknown evaluation method {method!r}")


def _series_at(coeffs, L, y, tau, *, workers=1, method="recurrence", drift=None):
    """Series value at arbitrary positions (odd 2L-periodic extension outside the well)."""
    _check_method(method)
    w = np.ascontiguousarray(np.asarray(y, dtype=float) / L)
    b_re, b_im = _weights(coeffs, L, tau)
    out = np.empty(w.shape[0], dtype=complex)
    if drift is None:
        drift = np.empty(w.shape[0])
    if workers <= 1 or w.shape[0] <= CHUNK:
        _series_row(b_re, b_im, w, out, drift, method)
        return out
    starts = list(range(0, w.shape[0], CHUNK))

    def task(s):
        sl = slice(s, s + CHUNK)
        part = np.empty(w[sl].shape[0], dtype=complex)
        _series_row(b_re, b_im, w[sl], part, drift[sl], method)
        out[sl] = part

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(task, starts))
    return out


def _check_positions(well, y):
    if not well.contains(y):
        raise DomainError(f"positions outside the well [-{well.L / 2}, {well.L / 2}]")


def amplitude_at(coeffs: ModalCoefficients, well: WellConfig, y: float, t: float) -> complex:
    """Psi(y, t) for a single point."""
    _check_positions(well, y)
    tau = phase_fraction(well, t)
    return complex(_series_at(coeffs, well.L, np.array([float(y)]), tau)[0])


def density_slice(
    coeffs: ModalCoefficients,
    well: WellConfig,
    y,
    t: float,
    *,
    workers: int = 1,
    method: str = "recurrence",
) -> WaveSlice:
    """Wave function at fixed time over ``y``; ``.density`` gives the density row.

    ``method="direct"`` evaluates every mode function with its own trig call
    (slow; kept as a reference for the recurrence).
    """
    y = np.ascontiguousarray(y, dtype=float)
    _check_positions(well, y)
    tau = phase_fraction(well, t)
    amp = _series_at(coeffs, well.L, y, tau, workers=workers, method=method)
    return WaveSlice(float(t), y, amp)


def slice_at_fraction(coeffs, well, y, tau, *, workers=1) -> np.ndarray:
    """Density at t = t_M + tau*T with tau given directly (no time round trip)."""
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    y = np.ascontiguousarray(y, dtype=float)
    _check_positions(well, y)
    amp = _series_at(coeffs, well.L, y, tau, workers=workers)
    return amp.real**2 + amp.imag**2


def recurrence_drift(coeffs, well, y, t) -> np.ndarray:
    """Per-point largest deviation of the rotation recurrence from direct evaluation."""
    y = np.ascontiguousarray(y, dtype=float)
    drift = np.zeros(y.shape[0])
    _series_at(coeffs, well.L, y, phase_fraction(well, t), drift=drift)
    return drift


def carpet(
    coeffs: ModalCoefficients, well: WellConfig, grid: SpaceTimeGrid, *, workers: int = 1
) -> DensityField:
    """Density over the whole space-time grid, one independent task per time row.

    Every row is evaluated by the same sequential code, so the output does
    not depend on ``workers``.
    """
    grid.check(well)
    w = np.ascontiguousarray(grid.y / well.L)
    taus = [phase_fraction(well, t) for t in grid.t]
    values = np.empty((grid.t.size, grid.y.size))

    def row(r):
        b_re, b_im = _weights(coeffs, well.L, taus[r])
        amp = np.empty(w.shape[0], dtype=complex)
        _series_row(b_re, b_im, w, amp, np.empty(w.shape[0]), "recurrence")
        values[r] = amp.real**2 + amp.imag**2

    if workers <= 1:
        for r in range(len(taus)):
            row(r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(row, range(len(taus))))
    return DensityField(values, grid)
