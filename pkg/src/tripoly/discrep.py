"""Discrepancy of orbit points scaled into the unit cube.

Exact computations enumerate critical boxes whose corners come from the
point coordinates (with limits from both sides, since the supremum over
half-open boxes is attained in such limits): the anchored star discrepancy
for up to three dimensions, and the extreme (all-boxes) discrepancy for up
to two. Large instances are tracked through the weighted exponential-sum
estimator instead; its unspecified leading constant is fixed to 1 and the
value is reported uncapped.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceeded
from .genseq import advance_to_cycle, generate_array
from .spectra import BoundEnvelope, _as_u64_rows, _sum_value, coefficient_box
from .trisys import TriangularSystem

DEFAULT_WORK_CAP = 10**8
DEFAULT_EXTREME_WORK_CAP = 5 * 10**7
DEFAULT_BOX_CAP = 10**7


def scale_points(u, p: int) -> np.ndarray:
    """Residue rows scaled by 1/p into [0,1)^m; order preserved."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr / p


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("need a nonempty 2-D point array")
    if pts.min() < 0.0 or pts.max() >= 1.0:
        raise ValueError("points must lie in [0, 1)^m")
    return pts


def star_discrepancy_exact(points, work_cap: int = DEFAULT_WORK_CAP) -> float:
    """Exact anchored discrepancy: sup over boxes [0, b) of
    |count/N - volume|, by enumerating corners from the coordinate grid and
    taking both open and closed counts at each."""
    pts = _as_points(points)
    n, m = pts.shape
    if m > 3 or n > 2000:
        raise CapExceeded(f"exact star discrepancy capped at m <= 3, N <= 2000 (got {m}, {n})")
    cands = [np.concatenate([np.unique(pts[:, j]), [1.0]]) for j in range(m)]
    work = n * math.prod(len(c) for c in cands)
    if work > work_cap:
        raise CapExceeded(f"corner enumeration work {work} exceeds cap {work_cap}")
    lt = [pts[:, j][None, :] < cands[j][:, None] for j in range(m)]
    le = [pts[:, j][None, :] <= cands[j][:, None] for j in range(m)]
    best = 0.0

    def descend(j, mask_lt, mask_le, vol):
        nonlocal best
        if j == m:
            gap_open = vol - mask_lt.sum() / n
            gap_closed = mask_le.sum() / n - vol
            if gap_open > best:
                best = gap_open
            if gap_closed > best:
                best = gap_closed
            return
        for idx in range(len(cands[j])):
            descend(j + 1, mask_lt & lt[j][idx], mask_le & le[j][idx],
                    vol * cands[j][idx])

    ones = np.ones(n, dtype=bool)
    descend(0, ones, ones, 1.0)
    return best


def _interval_extremes(ys: np.ndarray, n_total: int, weight: float) -> tuple[float, float]:
    """Largest overfull and underfull gap over real intervals [a, b) for a
    sorted 1-D multiset inside a slab of cross-measure `weight`, normalised
    by the total point count."""
    uy = np.unique(ys)
    if len(uy):
        p_lt = np.searchsorted(ys, uy, side="left")
        p_le = np.searchsorted(ys, uy, side="right")
        gain = p_le / n_total - weight * uy
        cost = p_lt / n_total - weight * uy
        over = float(np.max(gain - np.minimum.accumulate(cost)))
    else:
        p_lt = p_le = np.empty(0, dtype=np.int64)
        over = 0.0
    # underfull: open the interval just past a point (or 0) and stop just
    # short of a point (or 1)
    a_pos = np.concatenate([[0.0], uy])
    a_excl = np.concatenate([[0], p_le])
    b_pos = np.concatenate([uy, [1.0]])
    b_cnt = np.concatenate([p_lt, [len(ys)]])
    psi = weight * a_pos - a_excl / n_total
    phi = weight * b_pos - b_cnt / n_total
    minpsi = np.minimum.accumulate(psi)
    # the left candidate must sit strictly below the right one (both open),
    # so right index t admits left indices 0..t; the cube boundary admits all
    hi = np.minimum(np.arange(len(b_pos)), len(psi) - 1)
    under = float(np.max(phi - minpsi[hi]))
    return max(over, 0.0), max(under, 0.0)


def extreme_discrepancy_exact(points, work_cap: int = DEFAULT_EXTREME_WORK_CAP) -> float:
    """Exact discrepancy over all axis-parallel boxes [a, b), m <= 2."""
    pts = _as_points(points)
    n, m = pts.shape
    if m > 2 or n > 500:
        raise CapExceeded(f"exact extreme discrepancy capped at m <= 2, N <= 500 (got {m}, {n})")
    if m == 1:
        ys = np.sort(pts[:, 0])
        over, under = _interval_extremes(ys, n, 1.0)
        return max(over, under)
    order = np.argsort(pts[:, 1], kind="stable")
    ys_all = pts[order, 1]
    xs_of_ys = pts[order, 0]
    ux = np.unique(pts[:, 0])
    work = len(ux) ** 2 * n
    if work > work_cap:
        raise CapExceeded(f"interval enumeration work {work} exceeds cap {work_cap}")
    best = 0.0
    # overfull boxes pinch onto points from both sides in both dimensions
    for ai in range(len(ux)):
        for bi in range(ai, len(ux)):
            sel = (xs_of_ys >= ux[ai]) & (xs_of_ys <= ux[bi])
            over, _ = _interval_extremes(ys_all[sel], n, float(ux[bi] - ux[ai]))
            if over > best:
                best = over
    # underfull boxes open just past points (or run to the cube boundary)
    a_cands = np.concatenate([[0.0], ux])
    b_cands = np.concatenate([ux, [1.0]])
    for ai, alo in enumerate(a_cands):
        strict_lo = ai > 0
        for blo in b_cands:
            if blo < alo:
                continue
            sel = (xs_of_ys > alo) if strict_lo else (xs_of_ys >= alo)
            sel &= (xs_of_ys < blo) if blo < 1.0 else np.ones(n, dtype=bool)
            _, under = _interval_extremes(ys_all[sel], n, float(blo - alo))
            if under > best:
                best = under
    return best


# ----------------------------------------------------------------- estimator

def koksma_szusz_bound(u, p: int, limit: int, box_cap: int = DEFAULT_BOX_CAP,
                       method: str = "hist") -> float:
    """Weighted exponential-sum estimator on exact residues:
    1/L + (1/N) * sum over 0 < max|a_j| <= L of
    prod_j (|a_j|+1)^-1 * |sum_n e(a . u_n)|.

    Inner sums run on the reduced residues (a . u_n mod p), which is exact
    because the scaled coordinates are u/p. The leading constant is taken
    as 1 and the value is not capped at 1.
    """
    arr = _as_u64_rows(u)
    n, m = arr.shape
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if (2 * limit + 1) ** m - 1 > box_cap:
        raise CapExceeded(f"coefficient box exceeds cap {box_cap}")
    total = 0.0
    for a in coefficient_box(limit, m):
        cr = np.asarray([c % p for c in a], dtype=np.uint64)
        inner = abs(_sum_value(arr, cr, p, method))
        weight = 1.0
        for c in a:
            weight /= abs(c) + 1
        total += weight * inner
    return 1.0 / limit + total / n


def koksma_szusz_bound_points(points, limit: int, box_cap: int = DEFAULT_BOX_CAP) -> float:
    """Same estimator for arbitrary unit-cube points (CSV inputs); the inner
    sums use floating-point angles directly."""
    pts = _as_points(points)
    n, m = pts.shape
    if limit < 1:
        raise ValueError("limit must be at least 1")
    if (2 * limit + 1) ** m - 1 > box_cap:
        raise CapExceeded(f"coefficient box exceeds cap {box_cap}")
    total = 0.0
    for a in coefficient_box(limit, m):
        ang = 2.0 * math.pi * (pts @ np.asarray(a, dtype=np.float64))
        inner = abs(complex(float(np.cos(ang).sum()), float(np.sin(ang).sum())))
        weight = 1.0
        for c in a:
            weight /= abs(c) + 1
        total += weight * inner
    return 1.0 / limit + total / n


# ------------------------------------------------------------------- reports

@dataclass(frozen=True)
class DiscrepancyReport:
    p: int
    m: int
    nu: int
    n: int
    ks_bound: float
    limit: int
    envelope: float
    wall_time_ms: float
    exact: float | None = None

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "m": self.m,
            "nu": self.nu,
            "N": self.n,
            "ks_bound": self.ks_bound,
            "L": self.limit,
            "envelope": self.envelope,
            "wall_time_ms": self.wall_time_ms,
        }
        if self.exact is not None:
            out["exact"] = self.exact
        return out


def measure_residues(u, p: int, limit: int, nu: int = 1,
                     want_exact: bool = False,
                     box_cap: int = DEFAULT_BOX_CAP,
                     work_cap: int = DEFAULT_WORK_CAP) -> DiscrepancyReport:
    """Measurement of an explicit residue stream (orbit slice or CSV input):
    the estimator, optionally the exact star discrepancy, and the envelope."""
    t0 = time.perf_counter()
    arr = np.asarray(u, dtype=np.uint64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    n, m = arr.shape
    ks = koksma_szusz_bound(arr, p, limit, box_cap=box_cap)
    exact = None
    if want_exact:
        exact = star_discrepancy_exact(scale_points(arr, p), work_cap=work_cap)
    env = BoundEnvelope(m, nu).discrepancy_envelope(p, n)
    ms = (time.perf_counter() - t0) * 1000.0
    return DiscrepancyReport(
        p=p, m=m, nu=nu, n=n, ks_bound=ks, limit=limit,
        envelope=env, wall_time_ms=ms, exact=exact,
    )


def measure_discrepancy(sys: TriangularSystem, w0: Sequence, n: int, limit: int,
                        nu: int = 1, want_exact: bool = False,
                        box_cap: int = DEFAULT_BOX_CAP,
                        work_cap: int = DEFAULT_WORK_CAP,
                        max_steps: int = 10**8) -> DiscrepancyReport:
    """One orbit measurement: generate from the cycle entry point, then
    measure the emitted residues."""
    t0 = time.perf_counter()
    start = advance_to_cycle(sys, w0, max_steps=max_steps)
    u = generate_array(sys, start, n, skip_last=True)
    report = measure_residues(u, sys.field.p, limit, nu=nu,
                              want_exact=want_exact, box_cap=box_cap,
                              work_cap=work_cap)
    ms = (time.perf_counter() - t0) * 1000.0
    return DiscrepancyReport(
        p=report.p, m=report.m, nu=report.nu, n=report.n,
        ks_bound=report.ks_bound, limit=report.limit,
        envelope=report.envelope, wall_time_ms=ms, exact=report.exact,
    )
