"""Pattern diagnostics: distances, revival detection, plateau shape, far-field likeness
and box-counting dimension of density slices."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .io import _open_for_write
from .oracle import fraunhofer_envelope, fresnel_reference
from .propagator import _series_at, phase_fraction, slice_at_fraction
from .spectral import ModalCoefficients, SlitAperture, WellConfig

DEFAULT_THRESHOLD = 1e-3
DEFAULT_SCALES = (2.0**-14, 2.0**-6)
FRAUNHOFER_CORRELATION = 0.9
FRESNEL_CORRELATION = 0.95
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def l2_density_distance(p, q) -> float:
    """||p - q|| / ||q||."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValidationError(f"density vectors differ in shape: {p.shape} vs {q.shape}")
    den = np.linalg.norm(q)
    if den == 0:
        raise ValidationError("reference density is identically zero")
    return float(np.linalg.norm(p - q) / den)


def _check_symmetric(y):
    y = np.asarray(y, dtype=float)
    span = y[-1] - y[0]
    if not np.allclose(y, -y[::-1], rtol=0, atol=1e-12 * span):
        raise ValidationError("mirror comparison needs y samples symmetric about 0")


def mirror_distance(slice_, y) -> float:
    _check_symmetric(y)
    d = np.asarray(slice_, dtype=float)
    return l2_density_distance(d, d[::-1])


def plateau_flatness(slice_, slit: SlitAperture, y) -> float:
    """Relative standard deviation over the central 60% of the slit window."""
    y = np.asarray(y, dtype=float)
    d = np.asarray(slice_, dtype=float)[np.abs(y - slit.center) <= 0.3 * slit.width]
    if d.size < 2:
        raise ValidationError("grid has fewer than two samples inside the slit core")
    return float(np.std(d) / np.mean(d))


def _pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ValidationError("correlation undefined for constant or single-sample input")
    a = a - a.mean()
    b = b - b.mean()
    return float(np.dot(a, b) / math.sqrt(np.dot(a, a) * np.dot(b, b)))


def central_lobes(envelope, lobes: int = 3) -> slice:
    """Index range spanning the main lobe and (lobes-1)/2 side lobes per side.

    Lobe boundaries are the local minima met walking out from the peak.
    """
    e = np.asarray(envelope, dtype=float)
    peak = int(np.argmax(e))
    need = (lobes + 1) // 2

    def walk(step):
        i, found = peak, 0
        while 0 < i < e.size - 1:
            i += step
            if 0 < i < e.size - 1 and e[i] <= e[i - 1] and e[i] <= e[i + 1] and e[i] < e[peak]:
                found += 1
                if found == need:
                    return i
        return i

    return slice(walk(-1), walk(+1) + 1)


def sinc_correlation(slice_, envelope) -> float:
    """Pearson correlation of a slice with a far-field envelope over its central three lobes."""
    s = np.asarray(slice_, dtype=float)
    e = np.asarray(envelope, dtype=float)
    if s.shape != e.shape:
        raise ValidationError("slice and envelope must share a grid")
    sl = central_lobes(e)
    return _pearson(s[sl], e[sl])


def window_correlation(slice_, reference, y, center: float, half_width: float) -> float:
    """Pearson correlation restricted to |y - center| <= half_width."""
    y = np.asarray(y, dtype=float)
    m = np.abs(y - center) <= half_width
    return _pearson(np.asarray(slice_)[m], np.asarray(reference)[m])


def is_fraunhofer(slice_, y, slit: SlitAperture, t: float, well: WellConfig) -> bool:
    """Far-field regime: the central lobes correlate with the sinc^2 envelope.

    Plateau flatness is not part of the test; a far-field slice can still be
    nearly flat across the original slit width.
    """
    if not t > well.t_measure:
        return False
    env = fraunhofer_envelope(slit, t, y, well.hbar_over_m, well.t_measure)
    return sinc_correlation(slice_, env) >= FRAUNHOFER_CORRELATION


def fresnel_correlation(slice_, y, slit: SlitAperture, t: float, well: WellConfig) -> float:
    ref = fresnel_reference(slit, t, y, well.hbar_over_m, well.t_measure)
    return window_correlation(slice_, ref, y, slit.center, 5.0 * slit.width)


def is_fresnel(slice_, y, slit: SlitAperture, t: float, well: WellConfig) -> bool:
    """Near-field regime: matches the free-space edge-diffraction solution at the same time."""
    if not t > well.t_measure:
        return False
    return fresnel_correlation(slice_, y, slit, t, well) >= FRESNEL_CORRELATION


# --- revivals ---------------------------------------------------------------


@dataclass(frozen=True)
class RevivalHit:
    time: float
    metric: float
    kind: str  # "full", "mirror" or "fractional"
    copies: int = 1
    t_start: float | None = None
    t_end: float | None = None

    @property
    def label(self) -> str:
        return f"fractional/{self.copies}" if self.kind == "fractional" else self.kind


@dataclass
class RevivalReport:
    t_range: tuple[float, float]
    threshold: float
    hits: list[RevivalHit] = field(default_factory=list)

    def of_kind(self, kind: str) -> list[RevivalHit]:
        return [h for h in self.hits if h.kind == kind]

    def write_csv(self, path) -> None:
        with _open_for_write(path, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "metric", "class"])
            for h in self.hits:
                w.writerow([f"{h.time:.15g}", f"{h.metric:.15g}", h.label])


def gauss_weights(p: int, q: int) -> np.ndarray:
    """Weights G_j with exp(-2 pi i p n^2 / q) = sum_j G_j exp(2 pi i j n / q)."""
    m = np.arange(q)
    phase = np.exp(-2j * np.pi * ((p * m * m) % q) / q)
    j = m[:, None]
    return (phase[None, :] * np.exp(-2j * np.pi * ((j * m[None, :]) % q) / q)).sum(axis=1) / q


class _Templates:
    """Shifted copies of the initial amplitude, superposed with Gauss-sum weights."""

    def __init__(self, coeffs, well, y, workers):
        self.coeffs, self.well, self.y, self.workers = coeffs, well, np.asarray(y, float), workers
        self._shifted: dict[int, list[np.ndarray]] = {}

    def _copies(self, q):
        if q not in self._shifted:
            L = self.well.L
            self._shifted[q] = [
                _series_at(self.coeffs, L, self.y + 2.0 * L * j / q, 0.0, workers=self.workers)
                for j in range(q)
            ]
        return self._shifted[q]

    def density(self, p: int, q: int):
        g = gauss_weights(p, q)
        live = np.abs(g) > 1e-12
        amp = sum(gj * f for gj, f, keep in zip(g, self._copies(q), live) if keep)
        return np.abs(amp) ** 2, int(live.sum())


def _rational(tau: float, q_max: int) -> Fraction | None:
    fr = Fraction(tau).limit_denominator(q_max)
    if abs(float(fr) - tau) <= 1e-12 * max(1.0, tau):
        return fr
    return None


def _golden_min(f, lo, hi, tol):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _tau_samples(tau0: float, tau1: float, step: float) -> list[float]:
    """Scan lattice; snapped to exact fractions when the step is a simple fraction of T."""
    fs = Fraction(step).limit_denominator(10**6)
    f0 = Fraction(tau0).limit_denominator(10**6)
    if abs(float(fs) - step) <= 1e-12 * step and abs(float(f0) - tau0) <= 1e-12 * max(1.0, tau0):
        count = int(math.floor((Fraction(tau1) - f0) / fs + Fraction(1, 10**9)))
        return [float(f0 + k * fs) for k in range(count + 1)]
    count = int(math.floor((tau1 - tau0) / step + 1e-9))
    return [tau0 + k * step for k in range(count + 1)]


def revival_scan(
    coeffs: ModalCoefficients,
    well: WellConfig,
    y,
    t_range: tuple[float, float],
    step: float,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    q_max: int = 12,
    refine: bool = True,
    workers: int = 1,
) -> RevivalReport:
    """Find times in ``t_range`` where the density repeats the collapse pattern.

    Each sample is compared with the t_M slice (full revival), its reflection
    y -> -y (mirror revival) and, at rational fractions p/q of T with q <= q_max,
    with the Gauss-sum superposition of q shifted copies of the initial state
    (fractional revival). Runs of consecutive hits of one class collapse into
    one entry; isolated hits are refined by golden-section search.
    """
    if not step > 0:
        raise ValidationError("scan step must be positive")
    y = np.asarray(y, dtype=float)
    T = well.revival_time()
    tau0 = phase_fraction(well, t_range[0])
    tau1 = phase_fraction(well, t_range[1])
    base = slice_at_fraction(coeffs, well, y, 0.0, workers=workers)
    symmetric = np.allclose(y, -y[::-1], rtol=0, atol=1e-12 * (y[-1] - y[0]))
    mirrored = base[::-1] if symmetric else None
    templates = _Templates(coeffs, well, y, workers)

    def classify(tau, dens):
        full = l2_density_distance(dens, base)
        if full < threshold:
            return "full", full, 1
        if mirrored is not None:
            mir = l2_density_distance(dens, mirrored)
            if mir < threshold:
                return "mirror", mir, 1
        fr = _rational(tau, q_max)
        if fr is not None and fr.denominator >= 3:
            tmpl, k = templates.density(fr.numerator, fr.denominator)
            frac = l2_density_distance(dens, tmpl)
            if frac < threshold:
                return "fractional", frac, k
        return None, math.inf, 0

    def metric_of(kind, tau):
        dens = slice_at_fraction(coeffs, well, y, max(tau, 0.0), workers=workers)
        ref = base if kind == "full" else mirrored
        return l2_density_distance(dens, ref)

    samples = _tau_samples(tau0, tau1, step / T)
    raw = []
    for tau in samples:
        dens = slice_at_fraction(coeffs, well, y, tau, workers=workers)
        kind, metric, k = classify(tau, dens)
        raw.append((tau, kind, metric, k))

    hits: list[RevivalHit] = []
    i = 0
    while i < len(raw):
        tau, kind, metric, k = raw[i]
        if kind is None:
            i += 1
            continue
        j = i
        while j + 1 < len(raw) and raw[j + 1][1] == kind and raw[j + 1][3] == k:
            j += 1
        run = raw[i : j + 1]
        best = min(run, key=lambda r: r[2])
        b_tau, b_metric = best[0], best[2]
        if refine and kind in ("full", "mirror") and i == j:
            h = step / T
            lo = max(b_tau - h, 0.0)
            r_tau, r_metric = _golden_min(lambda s: metric_of(kind, s), lo, b_tau + h, 1e-6)
            if r_metric < b_metric:
                b_tau, b_metric = r_tau, r_metric
        t = well.t_measure + b_tau * T
        hits.append(
            RevivalHit(
                t, b_metric, kind, k,
                t_start=well.t_measure + run[0][0] * T,
                t_end=well.t_measure + run[-1][0] * T,
            )
        )
        i = j + 1
    return RevivalReport((float(t_range[0]), float(t_range[1])), threshold, hits)


def template_distance(coeffs, well, y, p: int, q: int, *, workers: int = 1) -> tuple[float, int]:
    """Distance of the slice at t_M + (p/q) T from its q-copy template, and the copy count."""
    dens = slice_at_fraction(coeffs, well, y, p / q, workers=workers)
    tmpl, k = _Templates(coeffs, well, y, workers).density(p, q)
    return l2_density_distance(dens, tmpl), k


# --- fractal dimension -------------------------------------------------------


@dataclass(frozen=True)
class BoxCount:
    dimension: float
    scales: np.ndarray
    counts: np.ndarray

    def __float__(self):
        return self.dimension


MIN_FRACTAL_SAMPLES = 2**16


def box_counting_dimension(slice_, y, scale_range=DEFAULT_SCALES, *, mask=None) -> BoxCount:
    """Box-counting dimension of the graph of a slice.

    The graph is rescaled to unit peak and unit y-span, covered by square
    boxes at every octave in ``scale_range``, and the dimension is the
    least-squares slope of log N(s) against log(1/s). Columns containing a
    sample with ``mask`` False are skipped.
    """
    v = np.asarray(slice_, dtype=float)
    y = np.asarray(y, dtype=float)
    if v.size < MIN_FRACTAL_SAMPLES:
        raise ValidationError(f"box counting needs >= {MIN_FRACTAL_SAMPLES} samples, got {v.size}")
    s_lo, s_hi = sorted(scale_range)
    k_hi = int(round(-math.log2(s_lo)))
    k_lo = int(round(-math.log2(s_hi)))
    if k_hi - k_lo < 3:
        raise ValidationError("scale range must span at least 3 octaves")
    if s_lo < 2.0 / (v.size - 1):
        raise ValidationError("smallest box is below twice the sample spacing")
    peak = v.max()
    if peak <= 0:
        raise ValidationError("slice has no positive values")
    v = v / peak
    x = (y - y[0]) / (y[-1] - y[0])
    keep = np.ones(v.size, bool) if mask is None else np.asarray(mask, bool)

    scales = np.array([2.0**-k for k in range(k_lo, k_hi + 1)])
    counts = np.empty(scales.size)
    for i, s in enumerate(scales):
        nb = int(round(1.0 / s))
        idx = np.minimum((x / s).astype(np.int64), nb - 1)
        starts = np.searchsorted(idx, np.arange(nb))
        # close each column with the next column's first sample so the graph stays connected
        nxt = np.minimum(np.append(starts[1:], v.size - 1), v.size - 1)
        lo = np.minimum(np.minimum.reduceat(v, starts), v[nxt])
        hi = np.maximum(np.maximum.reduceat(v, starts), v[nxt])
        ok = np.logical_and.reduceat(keep, starts)
        boxes = np.floor(hi / s) - np.floor(lo / s) + 1
        counts[i] = boxes[ok].sum()
    slope = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)[0]
    return BoxCount(float(slope), scales, counts)
