"""Parameter sets of the reference carpet and slice figures.

Figure 1 is a carpet (L = 50, y0 = 0, a = 10, N = 500); figures 2-7 are slices
of the L = 1, y0 = 0.245, a = 0.01 well, at N = 50000 unless a sweep over N
is the point of the figure. Times are in units with hbar/m = 1 and t_M = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

CARPET = dict(L=50.0, y0=0.0, a=10.0, N=500)
SLICE = dict(L=1.0, y0=0.245, a=0.01, N=50000)
T_UNIT = 4.0 / math.pi  # revival time of the L = 1 well


@dataclass(frozen=True)
class SliceSpec:
    name: str
    N: int
    tau: float  # fraction of the revival time


def _t(t):
    return t / T_UNIT


SLICES = [
    SliceSpec("fig2a", 100, 0.0),
    SliceSpec("fig2b", 1000, 0.0),
    SliceSpec("fig2c", 10000, 0.0),
    SliceSpec("fig2d", 50000, 0.0),
    SliceSpec("fig3a", 50000, 0.0),
    SliceSpec("fig3b", 50000, _t(2e-5)),
    SliceSpec("fig3c", 50000, _t(4e-5)),
    SliceSpec("fig4a", 50000, _t(2e-4)),
    SliceSpec("fig4b", 50000, _t(6e-4)),
    SliceSpec("fig5a", 50000, _t(2e-3)),
    SliceSpec("fig5b", 50000, _t(4e-3)),
    SliceSpec("fig5c", 50000, _t(6e-3)),
    SliceSpec("fig5d", 50000, _t(8e-3)),
    SliceSpec("fig6a", 50000, 0.0),
    SliceSpec("fig6b", 50000, 0.5),
    SliceSpec("fig6c", 50000, 1.0),
    *[SliceSpec(f"fig7a_t0.{k}T", 50000, k / 10) for k in (1, 3, 7, 9)],
    *[SliceSpec(f"fig7b_t0.{k}T", 50000, k / 10) for k in (2, 4, 6, 8)],
    SliceSpec("fig7c", 50000, 1.0 / 3.0),
    SliceSpec("fig7d", 50000, 0.25),
]
