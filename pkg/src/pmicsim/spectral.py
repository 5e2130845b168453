"""Infinite-well eigenbasis and the modal expansion of a collapsed wave function.

Positions are measured from the well centre, so the walls sit at y = -L/2 and
y = +L/2. Eigenfunctions are normalised with amplitude sqrt(2/L), which makes
the family orthonormal and the expansion coefficients dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class WellConfig:
    """Cavity length ``L``, ratio hbar/m and the measurement (collapse) time."""

    L: float = 1.0
    hbar_over_m: float = 1.0
    t_measure: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValidationError(f"well length must be positive and finite, got {self.L}")
        if not (math.isfinite(self.hbar_over_m) and self.hbar_over_m > 0):
            raise ValidationError(f"hbar_over_m must be positive and finite, got {self.hbar_over_m}")
        if not math.isfinite(self.t_measure):
            raise ValidationError(f"t_measure must be finite, got {self.t_measure}")

    def revival_time(self) -> float:
        """Period after which every mode phase is a multiple of 2*pi."""
        return 4.0 * self.L**2 / (math.pi * self.hbar_over_m)

    def contains(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all((y >= -0.5 * self.L) & (y <= 0.5 * self.L)))


@dataclass(frozen=True)
class SlitAperture:
    center: float
    width: float

    def __post_init__(self):
        if not math.isfinite(self.center):
            raise ValidationError(f"slit center must be finite, got {self.center}")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValidationError(f"slit width must be positive, got {self.width}")

    @property
    def lo(self) -> float:
        return self.center - 0.5 * self.width

    @property
    def hi(self) -> float:
        return self.center + 0.5 * self.width

    def check_inside(self, well: WellConfig) -> None:
        half = 0.5 * well.L
        if not (-half < self.lo and self.hi < half):
            raise DomainError(
                f"slit window [{self.lo}, {self.hi}] is not strictly inside the well [{-half}, {half}]"
            )


@dataclass(frozen=True)
class ModalCoefficients:
    """Expansion coefficients; ``values[k]`` belongs to mode n = k + 1.

    Real for any real collapse profile (the rectangular slit in particular);
    complex profiles give complex coefficients.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        v = np.ascontiguousarray(v, dtype=complex if np.iscomplexobj(v) else float)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("coefficients must be a non-empty 1-D vector")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.size

    def truncate(self, N: int) -> "ModalCoefficients":
        if not 1 <= N <= self.N:
            raise DomainError(f"cannot truncate {self.N} coefficients to {N}")
        return ModalCoefficients(self.values[:N])

    def norm_squared(self) -> float:
        return math.fsum(np.abs(self.values) ** 2)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)


@dataclass(frozen=True)
class CollapseProfile:
    """Collapsed (pre-evolution) wave function on a support window.

    ``kind`` is ``"rectangular"`` for the uniform slit profile or ``"general"``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    kind: str = "general"
    slit: SlitAperture | None = field(default=None, compare=False)

    @classmethod
    def rectangular(cls, slit: SlitAperture) -> "CollapseProfile":
        height = 1.0 / math.sqrt(slit.width)

        def rect(y):
            return np.full(np.shape(y), height)

        return cls(rect, slit.lo, slit.hi, kind="rectangular", slit=slit)

    def __call__(self, y):
        return self.func(np.asarray(y, dtype=float))


def _check_mode(n) -> None:
    if np.any(np.asarray(n) < 1):
        raise DomainError("mode index must be >= 1")


def _sin_wall_phase(n, w):
    """sin(n*pi*(w + 1/2)) for integer n and reduced position w = y/L.

    Uses cos/sin of n*pi*w with the n-mod-4 sign pattern, so the result is
    exactly even (odd n) or odd (even n) under w -> -w.
    """
    n = np.asarray(n, dtype=np.int64)
    cos, sin = _sincos_turns(_centered_turns(n, 0.5 * np.asarray(w, dtype=float)))
    r = n & 3
    out = np.where(r % 2 == 1, cos, sin)
    return np.where((r == 2) | (r == 3), -out, out)


def _sincos_turns(f):
    """cos and sin of 2*pi*f, exact at quarter turns."""
    k = np.copysign(np.floor(np.abs(4.0 * f) + 0.5), f)
    a = 2.0 * np.pi * (f - 0.25 * k)
    c, s = np.cos(a), np.sin(a)
    q = k.astype(np.int64) & 3
    cos = np.choose(q, [c, -s, -c, s])
    sin = np.choose(q, [s, c, -s, -c])
    return cos, sin


def _centered_turns(n, x):
    """n*x minus nearest integer, carrying the product in two terms."""
    n = np.asarray(n, dtype=float)
    p = n * x
    split = 134217729.0
    c = split * n
    nh = c - (c - n)
    nl = n - nh
    c = split * x
    xh = c - (c - x)
    xl = x - xh
    e = ((nh * xh - p) + nh * xl + nl * xh) + nl * xl
    k = np.copysign(np.floor(np.abs(p) + 0.5), p)
    return (p - k) + e


def _sin_pi(x, n):
    """sin(pi * n * x) with n integer, reduced before the trig call."""
    return _sincos_turns(_centered_turns(n, 0.5 * np.asarray(x, dtype=float)))[1]


def eigenfunction(n, y, well: WellConfig):
    """u_n(y) = sqrt(2/L) sin(n pi (y + L/2) / L)."""
    _check_mode(n)
    if not well.contains(y):
        raise DomainError(f"position outside the well [-{well.L / 2}, {well.L / 2}]")
    val = math.sqrt(2.0 / well.L) * _sin_wall_phase(n, np.asarray(y, dtype=float) / well.L)
    return float(val) if np.ndim(val) == 0 else val


def eigenenergy(n, well: WellConfig):
    """E_n / hbar = n^2 pi^2 (hbar/m) / (2 L^2)."""
    _check_mode(n)
    n = np.asarray(n, dtype=float)
    val = n * n * (math.pi**2 * well.hbar_over_m / (2.0 * well.L**2))
    return float(val) if val.ndim == 0 else val


def slit_coefficients(well: WellConfig, slit: SlitAperture, N: int) -> ModalCoefficients:
    """Closed-form overlap of the rectangular collapse profile with each mode.

    c_n = (2 sqrt 2 / (n pi)) sqrt(L/a) sin(n pi a / 2L) sin(n pi (y0 + L/2) / L)
    """
    if N < 1:
        raise DomainError("truncation order N must be >= 1")
    slit.check_inside(well)
    n = np.arange(1, N + 1)
    half_width = slit.width / (2.0 * well.L)
    amp = 2.0 * math.sqrt(2.0) / math.pi * math.sqrt(well.L / slit.width)
    c = amp / n * _sin_pi(half_width, n) * _sin_wall_phase(n, slit.center / well.L)
    return ModalCoefficients(c)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(k: int):
    if k not in _GL_CACHE:
        _GL_CACHE[k] = leggauss(k)
    return _GL_CACHE[k]


def _panel_integral(f, lo, hi, panels, nodes):
    x, wts = _gauss_legendre(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = f(pts).reshape(panels, nodes)
    return np.sum(vals * wts[None, :], axis=1) @ half


def _mode_integral(f, lo, hi, n, L, rtol=1e-13, max_doublings=6):
    span = n * (hi - lo) / L
    panels = max(1, math.ceil(span))
    total_nodes = max(4, math.ceil(8 * span))
    nodes = max(4, math.ceil(total_nodes / panels))
    prev = _panel_integral(f, lo, hi, panels, nodes)
    for _ in range(max_doublings):
        panels *= 2
        cur = _panel_integral(f, lo, hi, panels, nodes)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def coefficients_by_quadrature(
    well: WellConfig, profile: CollapseProfile, N: int, *, norm_tol: float = 1e-8
) -> ModalCoefficients:
    """Project a collapse profile onto the first N modes by panelled Gauss-Legendre.

    Each mode gets its own panel layout, scaled with the number of
    oscillations of u_n across the support. The result is checked against the
    next panel doubling and refined until the two agree.
    """
    if N < 1:
        raise DomainError("truncation order N must be >= 1")
    half = 0.5 * well.L
    if profile.lo < -half or profile.hi > half or profile.hi <= profile.lo:
        raise DomainError("profile support must be a non-empty window inside the well")
    norm = _mode_integral(lambda y: np.abs(profile(y)) ** 2, profile.lo, profile.hi, N, well.L)
    if abs(norm - 1.0) > norm_tol:
        raise ValidationError(f"collapse profile is not normalized: integral |psi|^2 = {norm!r}")

    amp = math.sqrt(2.0 / well.L)
    out = []
    for n in range(1, N + 1):
        k = n * math.pi / well.L

        def integrand(y, k=k):
            return profile(y) * (amp * np.sin(k * (y + half)))

        out.append(_mode_integral(integrand, profile.lo, profile.hi, n, well.L))
    return ModalCoefficients(np.array(out))


def parseval_deficit(coeffs: ModalCoefficients) -> float:
    """Norm left out by the truncation: 1 - sum c_n^2."""
    return 1.0 - coeffs.norm_squared()
