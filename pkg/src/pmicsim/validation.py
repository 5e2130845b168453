"""Oracle-equivalence checks run by ``pmicsim validate``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import l2_density_distance
from .config import RunConfig
from .oracle import crank_nicolson_evolve, sample_state
from .propagator import density_slice, slice_at_fraction, symmetric_grid
from .spectral import CollapseProfile, coefficients_by_quadrature, parseval_deficit, slit_coefficients

CN_LATTICE = 8192
CN_MODES = 50
# default-config step and horizon (1e-7 and 2e-4 at L = 1, hbar/m = 1), expressed in revival times
CN_STEP_FRACTION = 1e-7 * math.pi / 4
CN_HORIZON_FRACTION = 2e-4 * math.pi / 4


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    metric: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} metric={self.metric:.3e} limit={self.limit:.3e}"


def _check(name, metric, limit, ok=None):
    return Check(name, bool(metric <= limit) if ok is None else bool(ok), float(metric), float(limit))


def run_checks(cfg: RunConfig, *, workers: int = 1) -> list[Check]:
    well, slit = cfg.well, cfg.slit
    T = well.revival_time()
    checks = []

    nq = min(cfg.N, 1000)
    closed = slit_coefficients(well, slit, nq).values
    quad = coefficients_by_quadrature(well, CollapseProfile.rectangular(slit), nq).values
    err = np.max(np.abs(closed - quad) / np.maximum(1.0, np.abs(closed)))
    checks.append(_check("coefficients.closed_vs_quadrature", err, 1e-12))

    coeffs = slit_coefficients(well, slit, cfg.N)
    deficit = parseval_deficit(coeffs)
    checks.append(_check("coefficients.parseval_bound", -deficit, 1e-12))

    y = symmetric_grid(well.L, cfg.y_points)
    d0 = slice_at_fraction(coeffs, well, y, 0.0, workers=workers)
    dT = density_slice(coeffs, well, y, well.t_measure + T, workers=workers).density
    dH = density_slice(coeffs, well, y, well.t_measure + 0.5 * T, workers=workers).density
    tol = 1e-9 / slit.width
    checks.append(_check("propagator.full_revival", np.max(np.abs(dT - d0)), tol))
    checks.append(_check("propagator.mirror_revival", np.max(np.abs(dH - d0[::-1])), tol))

    small = coeffs.truncate(min(cfg.N, CN_MODES))
    start = sample_state(small, well, CN_LATTICE)
    dt = CN_STEP_FRACTION * T
    steps = int(round(CN_HORIZON_FRACTION / CN_STEP_FRACTION))
    evolved = {}
    for k in (1, 2, 4):
        evolved[k] = crank_nicolson_evolve(start, well, dt / k, steps * k, max_mode=small.N)
    t_end = well.t_measure + steps * dt
    spectral = density_slice(small, well, start.y, t_end, workers=workers).density
    checks.append(
        _check("oracle.crank_nicolson_vs_spectral", l2_density_distance(evolved[4].density, spectral), 1e-3)
    )
    drift = abs(evolved[1].norm() / start.norm() - 1.0)
    checks.append(_check("oracle.crank_nicolson_norm", drift, 1e-8))
    e1 = np.linalg.norm(evolved[1].values - evolved[2].values)
    e2 = np.linalg.norm(evolved[2].values - evolved[4].values)
    ratio = e1 / e2
    checks.append(_check("oracle.crank_nicolson_dt_order", ratio, 4.8, ok=3.2 <= ratio <= 4.8))
    return checks
