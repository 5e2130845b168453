"""Independent references for the spectral propagator.

* A Crank-Nicolson lattice evolver with hard walls (second order in time and
  space, nothing shared with the eigenbasis route).
* Free-space diffraction of the ideal rectangle: the exact Fresnel solution and
  the far-field sinc^2 envelope, valid until the spreading wave reaches a wall.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu
from scipy.special import erf

from .errors import DomainError, ValidationError
from .propagator import _series_at, phase_fraction
from .spectral import ModalCoefficients, SlitAperture, WellConfig

MIN_LATTICE = 1024


@dataclass(frozen=True)
class LatticeState:
    """Interior amplitudes psi_j at y_j = -L/2 + j*h, j = 1..M, h = L/(M+1)."""

    values: np.ndarray
    L: float
    t: float = 0.0

    @property
    def M(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return self.L / (self.M + 1)

    @property
    def y(self) -> np.ndarray:
        return lattice_points(self.L, self.M)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return math.sqrt(self.h * math.fsum(self.density))


def lattice_points(L: float, M: int) -> np.ndarray:
    h = L / (M + 1)
    return -0.5 * L + h * np.arange(1, M + 1)


def sample_state(coeffs: ModalCoefficients, well: WellConfig, M: int, t: float | None = None) -> LatticeState:
    """Sample the truncated spectral state on the lattice (at t_M by default)."""
    if M < MIN_LATTICE:
        raise ValidationError(f"lattice needs at least {MIN_LATTICE} interior points, got {M}")
    if coeffs.N * math.pi / well.L >= math.pi * (M + 1) / well.L:
        raise ValidationError(
            f"mode {coeffs.N} is not resolved by a lattice of {M} points; use M >= {coeffs.N}"
        )
    t = well.t_measure if t is None else t
    tau = phase_fraction(well, t)
    return LatticeState(_series_at(coeffs, well.L, lattice_points(well.L, M), tau), well.L, t)


def _cn_operators(M, h, dt, hbar_over_m):
    # H/hbar = -(hbar/2m) * second difference / h^2
    g = 0.5 * dt * hbar_over_m / (2.0 * h * h)
    main = np.full(M, 1.0 + 2j * g)
    off = np.full(M - 1, -1j * g)
    lhs = sparse.diags([off, main, off], [-1, 0, 1], format="csc")
    rhs = sparse.diags([-off, 2.0 - main, -off], [-1, 0, 1], format="csr")
    return splu(lhs), rhs


def crank_nicolson_evolve(
    initial: LatticeState, well: WellConfig, dt: float, steps: int, *, max_mode: int | None = None
) -> LatticeState:
    """Advance ``initial`` by ``steps`` Crank-Nicolson steps of size ``dt``.

    Each step solves (1 + i dt H / 2hbar) psi' = (1 - i dt H / 2hbar) psi with
    the 3-point Laplacian. ``max_mode``, when given, is checked against the
    lattice resolution.
    """
    if not dt > 0:
        raise DomainError(f"time step must be positive, got {dt}")
    if steps < 0:
        raise DomainError("step count must be >= 0")
    M = initial.M
    if M < MIN_LATTICE:
        raise ValidationError(f"lattice needs at least {MIN_LATTICE} interior points, got {M}")
    h = initial.h
    if max_mode is not None and max_mode * math.pi / initial.L >= math.pi / h:
        raise ValidationError(f"mode {max_mode} is not resolved by lattice spacing {h}; refine the lattice")
    lu, rhs = _cn_operators(M, h, dt, well.hbar_over_m)
    psi = np.array(initial.values, dtype=complex)
    for _ in range(steps):
        psi = lu.solve(rhs @ psi)
    return LatticeState(psi, initial.L, initial.t + steps * dt)


def free_space_window(slit: SlitAperture, well: WellConfig, N: int) -> float:
    """Latest time t - t_M at which free-space references ignore the walls.

    Uses the group speed of the highest retained mode, (hbar/m) * N*pi/L.
    """
    gap = min(slit.lo + 0.5 * well.L, 0.5 * well.L - slit.hi)
    return gap / (well.hbar_over_m * N * math.pi / well.L)


def _elapsed(t, t_measure):
    dt = t - t_measure
    if not dt > 0:
        raise DomainError("free-space references need t > t_M")
    return dt


def fraunhofer_envelope(slit: SlitAperture, t: float, y, hbar_over_m: float = 1.0, t_measure: float = 0.0):
    """Unit-peak far-field shape sinc^2(a (y - y0) / (2 (hbar/m) (t - t_M)))."""
    dt = _elapsed(t, t_measure)
    x = slit.width * (np.asarray(y, dtype=float) - slit.center) / (2.0 * hbar_over_m * dt)
    return np.sinc(x / np.pi) ** 2


def fresnel_amplitude(slit: SlitAperture, t: float, y, hbar_over_m: float = 1.0, t_measure: float = 0.0):
    """Free-particle evolution of the normalised rectangle (exact Fresnel propagator)."""
    dt = _elapsed(t, t_measure)
    y = np.asarray(y, dtype=float)
    scale = math.sqrt(1.0 / (2.0 * hbar_over_m * dt)) * np.exp(-0.25j * math.pi)
    upper = erf(scale * (slit.hi - y))
    lower = erf(scale * (slit.lo - y))
    return (upper - lower) / (2.0 * math.sqrt(slit.width))


def fresnel_reference(slit: SlitAperture, t: float, y, hbar_over_m: float = 1.0, t_measure: float = 0.0):
    """Density of the free-space Fresnel solution."""
    return np.abs(fresnel_amplitude(slit, t, y, hbar_over_m, t_measure)) ** 2
