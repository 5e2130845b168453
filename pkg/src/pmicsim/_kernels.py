"""Compiled inner loops: exact-ish argument reduction and the recurrence-driven sine series.

Everything here is ``nogil`` so that callers can fan work out over plain
threads; results never depend on how the work is split.
"""
import math

import numpy as np
from numba import njit

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitter for binary64
TWO_PI = 2.0 * math.pi

# Terms per recurrence block. The rotation is re-seeded from direct evaluation
# at every block boundary and block partial sums are combined with compensation.
BLOCK = 4096


@njit(cache=True, nogil=True)
def two_product(a, b):
    """Return (p, e) with p = fl(a*b) and a*b == p + e exactly."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@njit(cache=True, nogil=True)
def nearest_int(x):
    # round half away from zero; symmetric under x -> -x
    return math.copysign(math.floor(abs(x) + 0.5), x)


@njit(cache=True, nogil=True)
def frac_of_product(m, x):
    """Fractional part of m*x in [0, 1), with the product carried in two terms."""
    p, e = two_product(m, x)
    # past 2**53 the error term carries whole turns of its own
    f = (p - math.floor(p)) + (e - math.trunc(e))
    if f < 0.0:
        f += 1.0
    if f >= 1.0:
        f -= 1.0
        if f < 0.0 or f >= 1.0:
            f = 0.0
    return f


@njit(cache=True, nogil=True)
def centered_frac_of_product(m, x):
    """m*x minus its nearest integer, in [-1/2, 1/2]; odd in x."""
    p, e = two_product(m, x)
    r = (p - nearest_int(p)) + (e - math.trunc(e))
    return r - nearest_int(r)


@njit(cache=True, nogil=True)
def sincos_turns(f):
    """(cos 2*pi*f, sin 2*pi*f), exact at every quarter turn."""
    k = nearest_int(4.0 * f)
    r = f - 0.25 * k
    a = TWO_PI * r
    c = math.cos(a)
    s = math.sin(a)
    q = int(k) & 3
    if q == 0:
        return c, s
    elif q == 1:
        return -s, c
    elif q == 2:
        return -c, -s
    return s, -c


@njit(cache=True, nogil=True)
def mode_weights(c, tau, scale, out_re, out_im):
    """Fold evolution phase and wall-offset sign into the modal coefficients.

    With w = y/L the eigenfunction is sin(n*pi*w + n*pi/2), i.e. cos(n*pi*w)
    for odd n and sin(n*pi*w) for even n up to a sign that cycles with n mod 4.
    """
    for k in range(c.shape[0]):
        n = k + 1
        m = float(n) * float(n)
        pc, ps = sincos_turns(frac_of_product(m, tau))
        r = n & 3
        sign = 1.0 if (r == 1 or r == 0) else -1.0
        v = scale * sign * c[k]
        out_re[k] = v * pc
        out_im[k] = -v * ps


@njit(cache=True, nogil=True)
def _two_sum(a, b):
    s = a + b
    bp = s - a
    e = (a - (s - bp)) + (b - bp)
    return s, e


@njit(cache=True, nogil=True)
def series_chunk(b_re, b_im, w, out_re, out_im, drift):
    """Evaluate sum_n b_n * v_n(w) on a chunk of reduced positions w = y/L.

    v_n is cos(n*pi*w) for odd n and sin(n*pi*w) for even n, produced by
    rotating e^{i n pi w} one step per mode. ``drift`` receives, per point, the
    largest rotation error observed at a re-seed.
    """
    npts = w.shape[0]
    nmodes = b_re.shape[0]
    rot_c = np.empty(npts)
    rot_s = np.empty(npts)
    zr = np.empty(npts)
    zi = np.empty(npts)
    pr = np.empty(npts)
    pi_ = np.empty(npts)
    tr = np.zeros(npts)
    ti = np.zeros(npts)
    cr = np.zeros(npts)
    ci = np.zeros(npts)
    for j in range(npts):
        rot_c[j], rot_s[j] = sincos_turns(0.5 * w[j])
        drift[j] = 0.0
    start = 0
    while start < nmodes:
        stop = min(start + BLOCK, nmodes)
        n0 = float(start + 1)
        for j in range(npts):
            dc, ds = sincos_turns(centered_frac_of_product(n0, 0.5 * w[j]))
            if start > 0:
                d = max(abs(zr[j] - dc), abs(zi[j] - ds))
                if d > drift[j]:
                    drift[j] = d
            zr[j] = dc
            zi[j] = ds
            pr[j] = 0.0
            pi_[j] = 0.0
        k = start
        while k < stop:
            # mode index k+1; odd modes take the cosine part, even the sine part
            br = b_re[k]
            bi = b_im[k]
            if (k & 1) == 0:
                for j in range(npts):
                    v = zr[j]
                    pr[j] += br * v
                    pi_[j] += bi * v
                    x = zr[j] * rot_c[j] - zi[j] * rot_s[j]
                    zi[j] = zr[j] * rot_s[j] + zi[j] * rot_c[j]
                    zr[j] = x
            else:
                for j in range(npts):
                    v = zi[j]
                    pr[j] += br * v
                    pi_[j] += bi * v
                    x = zr[j] * rot_c[j] - zi[j] * rot_s[j]
                    zi[j] = zr[j] * rot_s[j] + zi[j] * rot_c[j]
                    zr[j] = x
            k += 1
        for j in range(npts):
            s, e = _two_sum(tr[j], pr[j])
            tr[j] = s
            cr[j] += e
            s, e = _two_sum(ti[j], pi_[j])
            ti[j] = s
            ci[j] += e
        start = stop
    for j in range(npts):
        out_re[j] = tr[j] + cr[j]
        out_im[j] = ti[j] + ci[j]


@njit(cache=True, nogil=True)
def series_chunk_direct(b_re, b_im, w, out_re, out_im):
    """Same sum as ``series_chunk`` but every mode function evaluated directly."""
    npts = w.shape[0]
    nmodes = b_re.shape[0]
    for j in range(npts):
        tr = 0.0
        ti = 0.0
        cr = 0.0
        ci = 0.0
        start = 0
        while start < nmodes:
            stop = min(start + BLOCK, nmodes)
            pr = 0.0
            pim = 0.0
            for k in range(start, stop):
                c, s = sincos_turns(centered_frac_of_product(float(k + 1), 0.5 * w[j]))
                v = c if (k & 1) == 0 else s
                pr += b_re[k] * v
                pim += b_im[k] * v
            s1, e1 = _two_sum(tr, pr)
            tr = s1
            cr += e1
            s1, e1 = _two_sum(ti, pim)
            ti = s1
            ci += e1
            start = stop
        out_re[j] = tr + cr
        out_im[j] = ti + ci
